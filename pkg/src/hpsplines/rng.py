"""Self-contained deterministic Gaussian stream for reproducible demos.

The generator is fully specified here so the same seed yields bit-identical
noise on any platform or Python version:

* State update: splitmix64. Each draw adds ``0x9E3779B97F4A7C15`` to a
  64-bit state, then mixes ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
  z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`` (all mod 2**64).
* Uniforms: the top 53 bits of a mixed word, ``u = (word >> 11) * 2**-53``.
* Normals: Box-Muller on consecutive uniforms, with a half-step offset on
  the first so the logarithm never sees zero:
  ``u1 = ((w1 >> 11) + 0.5) * 2**-53``, ``u2 = (w2 >> 11) * 2**-53``,
  ``z0 = sqrt(-2 ln u1) cos(2 pi u2)``, ``z1 = sqrt(-2 ln u1) sin(2 pi u2)``.
  Pairs are consumed in order ``z0, z1``.
"""

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U53 = 2.0 ** -53


class SplitMix64:
    """64-bit splitmix64 word generator."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_word(self):
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self):
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_word() >> 11) * _U53


class GaussianStream:
    """Standard normal draws via Box-Muller over splitmix64 uniforms."""

    def __init__(self, seed):
        self._words = SplitMix64(seed)
        self._spare = None

    def normal(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = ((self._words.next_word() >> 11) + 0.5) * _U53
        u2 = (self._words.next_word() >> 11) * _U53
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare = r * math.sin(theta)
        return r * math.cos(theta)

    def normals(self, count):
        """List of ``count`` consecutive standard normal draws."""
        return [self.normal() for _ in range(int(count))]
