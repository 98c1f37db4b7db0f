"""Geodesic integration: Euler-Arnold + flow equations, exact Cheeger solutions."""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, GroupElement, expm_skew
from .errors import IntegrationDivergedError, MetricConstructionError

CONSERVATION_TOL = 1e-9


def _polar_retract(gamma):
    """Nearest orthogonal/unitary matrix (polar factor), with det-phase fix.

    Returns None when the polar factor flips orientation (the frame left the
    special group entirely), so callers can report divergence with a time.
    """
    u, _, vh = np.linalg.svd(gamma)
    q = u @ vh
    det = np.linalg.det(q)
    if np.iscomplexobj(q):
        return q * np.exp(-1j * np.angle(det) / q.shape[0])
    if det < 0:
        return None
    return q


class GeodesicTrajectory:
    """Sampled geodesic: times, algebra velocities u(t_i), group frames gamma(t_i).

    Stores the conserved pair (k, l) = (g(u,u), <Lambda u, Lambda u>) per
    sample; their relative drift is the integrator's health metric.  Velocity
    interpolation between samples is cubic Hermite with slopes ad*_u u.
    """

    def __init__(self, metric, times, velocities, frames, conserved):
        self.metric = metric
        self.basis = metric.basis
        self.times = np.asarray(times)
        self.velocities = np.asarray(velocities)
        self.frames = np.asarray(frames)
        self.conserved = np.asarray(conserved)
        self._slopes = np.array(
            [metric.ad_star_raw(u, u) for u in self.velocities]
        )
        for arr in (self.times, self.velocities, self.frames, self.conserved):
            arr.setflags(write=False)

    @property
    def u0(self):
        return AlgebraElement(self.basis, self.velocities[0])

    def duration(self):
        return float(self.times[-1])

    def is_steady(self, tol=1e-8):
        return float(np.max(np.linalg.norm(self._slopes, axis=1))) < tol

    def conservation_drift(self):
        """Max relative drift of (k, l) over the grid."""
        ref = np.abs(self.conserved[0])
        ref = np.where(ref > 1e-300, ref, 1.0)
        return float(np.abs((self.conserved - self.conserved[0]) / ref).max())

    def velocity_at(self, t):
        """Cubic Hermite interpolation of u(t) using u' = ad*_u u for slopes."""
        t = float(t)
        ts = self.times
        if t <= ts[0]:
            return self.velocities[0]
        if t >= ts[-1]:
            return self.velocities[-1]
        i = int(np.searchsorted(ts, t, side="right") - 1)
        h = ts[i + 1] - ts[i]
        s = (t - ts[i]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return (
            h00 * self.velocities[i]
            + h10 * h * self._slopes[i]
            + h01 * self.velocities[i + 1]
            + h11 * h * self._slopes[i + 1]
        )

    def frame_at_index(self, i):
        return GroupElement(self.basis, self.frames[i])

    def velocity_at_index(self, i):
        return AlgebraElement(self.basis, self.velocities[i])

    def index_of_time(self, t, tol=1e-9):
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > tol + 1e-12 * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not on the sample grid")
        return i

    def export_csv(self, path, config_hash=None):
        """CSV with t, u coordinates, vectorized frame entries, k, l."""
        dim = self.basis.dim
        n = self.basis.matrix_size
        complex_frames = np.iscomplexobj(self.frames)
        cols = ["t"]
        cols += [f"u{i}" for i in range(dim)]
        for r in range(n):
            for c in range(n):
                cols += (
                    [f"g{r}{c}re", f"g{r}{c}im"] if complex_frames else [f"g{r}{c}"]
                )
        cols += ["k", "l"]
        with open(path, "w") as fh:
            if config_hash is not None:
                fh.write(f"# config_hash: {config_hash}\n")
            fh.write(",".join(cols) + "\n")
            for idx, t in enumerate(self.times):
                row = [f"{t:.17g}"]
                row += [f"{v:.17g}" for v in self.velocities[idx]]
                for entry in self.frames[idx].flat:
                    if complex_frames:
                        row += [f"{entry.real:.17g}", f"{entry.imag:.17g}"]
                    else:
                        row += [f"{entry:.17g}"]
                row += [f"{v:.17g}" for v in self.conserved[idx]]
                fh.write(",".join(row) + "\n")


def default_step(T):
    return min(1e-3, T / 2000.0)


def integrate_euler_arnold(metric, u0, T, dt=None, retract_every=1):
    """Fixed-step RK4 on gamma' = gamma u, u' = ad*_u u, from the identity.

    The frame is re-projected to the group by polar decomposition every
    ``retract_every`` steps.  Raises IntegrationDivergedError on non-finite
    state, reporting the last valid time.
    """
    basis = metric.basis
    basis.require_same(u0.basis)
    if T <= 0:
        raise ValueError("horizon T must be positive")
    if dt is None:
        dt = default_step(T)
    if dt > T:
        raise ValueError("dt must not exceed T")
    n_steps = int(round(T / dt))
    dt = T / n_steps
    mats = basis.basis_matrices

    def u_rhs(u):
        return metric.ad_star_raw(u, u)

    u = np.array(u0.coords)
    gamma = np.eye(basis.matrix_size, dtype=mats.dtype)
    gram = basis.biinv_gram

    def conserved_pair(u):
        lu = metric.apply_raw(u)
        return (float(u @ gram @ lu), float(lu @ gram @ lu))

    times = np.linspace(0.0, T, n_steps + 1)
    velocities = np.empty((n_steps + 1, basis.dim))
    frames = np.empty((n_steps + 1,) + gamma.shape, dtype=gamma.dtype)
    conserved = np.empty((n_steps + 1, 2))
    velocities[0], frames[0], conserved[0] = u, gamma, conserved_pair(u)

    for step in range(n_steps):
        k1u = u_rhs(u)
        k1g = gamma @ np.tensordot(u, mats, axes=1)
        u2 = u + 0.5 * dt * k1u
        g2 = gamma + 0.5 * dt * k1g
        k2u = u_rhs(u2)
        k2g = g2 @ np.tensordot(u2, mats, axes=1)
        u3 = u + 0.5 * dt * k2u
        g3 = gamma + 0.5 * dt * k2g
        k3u = u_rhs(u3)
        k3g = g3 @ np.tensordot(u3, mats, axes=1)
        u4 = u + dt * k3u
        g4 = gamma + dt * k3g
        k4u = u_rhs(u4)
        k4g = g4 @ np.tensordot(u4, mats, axes=1)
        u = u + dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        gamma = gamma + dt / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(gamma))):
            raise IntegrationDivergedError(
                f"non-finite state at t={times[step + 1]:.6g}",
                last_valid_time=float(times[step]),
            )
        if (step + 1) % retract_every == 0:
            retracted = _polar_retract(gamma)
            if retracted is None:
                raise IntegrationDivergedError(
                    f"frame left the group at t={times[step + 1]:.6g}",
                    last_valid_time=float(times[step]),
                )
            gamma = retracted
        velocities[step + 1] = u
        frames[step + 1] = gamma
        conserved[step + 1] = conserved_pair(u)

    return GeodesicTrajectory(metric, times, velocities, frames, conserved)


def cheeger_geodesic_exact(metric, u0, t):
    """Exact Cheeger geodesic gamma(t) = e^{t Lambda u0} e^{-delta t p0}.

    Returns the frame and the algebra velocity u(t) = Ad_{exp(delta t p0)} u0.
    """
    if metric.variant != "cheeger":
        raise MetricConstructionError("exact geodesic formula needs a Cheeger metric")
    basis = metric.basis
    basis.require_same(u0.basis)
    delta = metric.delta
    m = basis.subalgebra_dim
    p0 = np.zeros(basis.dim)
    p0[:m] = u0.coords[:m]
    lam_u0 = metric.apply_raw(u0.coords)
    p0_mat = np.tensordot(p0, basis.basis_matrices, axes=1)
    frame = expm_skew(t * np.tensordot(lam_u0, basis.basis_matrices, axes=1)) @ expm_skew(
        -delta * t * p0_mat
    )
    eta = expm_skew(delta * t * p0_mat)
    u_mat = eta @ np.tensordot(u0.coords, basis.basis_matrices, axes=1) @ eta.conj().T
    return GroupElement(basis, frame), AlgebraElement(basis, basis.coords_of(u_mat))


def closed_biinvariant_time(metric, u0, horizon, n_samples=4096, tol=1e-8):
    """Smallest t in (0, horizon] with exp(t Lambda u0) = id, or None.

    Scans the Frobenius distance of the one-parameter subgroup generated by
    Lambda u0 from the identity and refines local minima by golden-section.
    """
    if metric.variant != "cheeger":
        raise MetricConstructionError("closed-time scan is defined for Cheeger metrics")
    basis = metric.basis
    lam_u0 = np.tensordot(metric.apply_raw(u0.coords), basis.basis_matrices, axes=1)
    w = np.linalg.eigvalsh(1j * np.asarray(lam_u0, dtype=complex))

    def defect(t):
        # || exp(t Lambda u0) - id ||_F from the eigenphases
        return float(np.sqrt(np.sum(np.abs(np.exp(-1j * w * t) - 1.0) ** 2)))

    ts = np.linspace(0.0, horizon, n_samples + 1)[1:]
    vals = np.sqrt(np.sum(np.abs(np.exp(-1j * np.outer(ts, w)) - 1.0) ** 2, axis=1))
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    # earliest closing time wins: walk the local minima in time order
    candidates = [
        i
        for i in range(len(ts))
        if vals[i] < 1e-2
        and (i == 0 or vals[i] <= vals[i - 1])
        and (i == len(ts) - 1 or vals[i] <= vals[i + 1])
    ]
    for i in candidates:
        lo = ts[max(i - 1, 0)] if i > 0 else ts[i] / 2.0
        hi = ts[min(i + 1, len(ts) - 1)]
        a, b = lo, hi
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = defect(c), defect(d)
        for _ in range(200):
            if b - a < 1e-14 * max(1.0, b):
                break
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = defect(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = defect(d)
        t_min = (a + b) / 2.0
        if defect(t_min) < tol:
            return float(t_min)
    return None
