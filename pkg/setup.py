import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                'hpsplines._kernels',
                ['src/hpsplines/_kernels.pyx'],
                include_dirs=[numpy.get_include()],
                define_macros=[('NPY_NO_DEPRECATED_API', 'NPY_1_7_API_VERSION')],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
