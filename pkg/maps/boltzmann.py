import numpy as np
from scipy.special import logsumexp

from maps.counting import boltzmann_log_weights
from maps.decomposition import sample_uniform
from maps.triangulation import MarkedTriangulation, Triangulation
from state.errors import TailCutoffExceeded


class BoltzmannSampler:
    """
    Exact sampler for Boltzmann triangulations of the ℓ-gon: P[M] ∝ (2/27)^{n(M)}.

    Two stages: draw n from P[n=k] ∝ T(ℓ,k)(2/27)^k, then a uniform map with
    that (ℓ, n). The law of n has a polynomial tail, so it is truncated at the
    smallest n_max whose extrapolated residual mass is below `tail_tolerance`
    (relative to the truncated partition function). The residual is estimated
    by fitting the local power-law exponent s of the weights at n_max and
    integrating w(n_max)·(k/n_max)^{-s} beyond it.
    """

    def __init__(
        self,
        boundary_length: int,
        tail_tolerance: float = 1e-6,
        max_inner: int = 1_000_000,
        verbose: bool = False,
    ):
        if boundary_length < 3:
            raise ValueError(f"boundary length must be >= 3, got {boundary_length}")
        self.boundary_length = boundary_length
        self.tail_tolerance  = tail_tolerance
        self.max_inner       = max_inner

        self.n_max, self.residual, log_weights = self._find_cutoff()
        self.log_partition = float(logsumexp(log_weights))
        probabilities = np.exp(log_weights - self.log_partition)
        self._cumulative = np.cumsum(probabilities)

        if verbose:
            print(
                f"[BoltzmannSampler] l={boundary_length} n_max={self.n_max} "
                f"residual={self.residual:.2e} log Z={self.log_partition:.6f}"
            )

    def _find_cutoff(self) -> tuple[int, float, np.ndarray]:
        size = 256
        while True:
            size = min(size, self.max_inner)
            logw = boltzmann_log_weights(self.boundary_length, size)
            k = np.arange(2, size + 1)
            exponent = (logw[1:-1] - logw[2:]) / np.log(k / (k - 1))
            log_partial = np.logaddexp.accumulate(logw)[2:]
            with np.errstate(divide="ignore", invalid="ignore"):
                relative = np.where(
                    exponent > 1.0,
                    np.exp(logw[2:] - log_partial) * k / (exponent - 1.0),
                    np.inf,
                )
            ok = np.flatnonzero(relative <= self.tail_tolerance)
            if ok.size:
                n_max = int(k[ok[0]])
                return n_max, float(relative[ok[0]]), logw[: n_max + 1]
            if size >= self.max_inner:
                raise TailCutoffExceeded(
                    f"residual mass for l={self.boundary_length} stays above "
                    f"{self.tail_tolerance:g} up to n={self.max_inner}; raise maps.max_inner "
                    f"or loosen maps.tail_tolerance"
                )
            size *= 2

    @property
    def metadata(self) -> dict:
        return {
            "boundary_length": self.boundary_length,
            "n_max":           self.n_max,
            "tail_residual":   self.residual,
            "tail_tolerance":  self.tail_tolerance,
            "log_partition":   self.log_partition,
        }

    def probability_of_size(self, n: int) -> float:
        """Truncated P[n(M) = n]."""
        if n < 0 or n > self.n_max:
            return 0.0
        below = self._cumulative[n - 1] if n > 0 else 0.0
        return float(self._cumulative[n] - below)

    def sample_size(self, rng: np.random.Generator) -> int:
        u = rng.random() * self._cumulative[-1]
        return int(min(np.searchsorted(self._cumulative, u, side="right"), self.n_max))

    def sample(self, rng: np.random.Generator) -> Triangulation:
        n = self.sample_size(rng)
        return sample_uniform(self.boundary_length, n, rng)


def sample_boltzmann(ell: int, rng: np.random.Generator, **sampler_kwargs) -> Triangulation:
    """One Boltzmann triangulation of the ℓ-gon; see BoltzmannSampler for the cutoff knobs."""
    return BoltzmannSampler(ell, **sampler_kwargs).sample(rng)


def sample_marked_edges(tri: Triangulation, rng: np.random.Generator) -> MarkedTriangulation:
    """a = root edge 0; (b, c) uniform among the C(ℓ-1, 2) counterclockwise choices."""
    ell = tri.boundary_length
    pairs = [(b, c) for b in range(1, ell) for c in range(b + 1, ell)]
    b, c = pairs[int(rng.integers(len(pairs)))]
    return MarkedTriangulation(tri, 0, b, c)
