"""Command-line interface: curvature | geodesic | conjugate | steady | locus | verify.

Runs are driven by a single JSON config document; command-line flags override
config fields.  Every output file embeds the sha256 hash of the normalized
config, and a run manifest (config echo, tool version, seed, tolerances) is
written next to the outputs.  Exit codes: 0 success, 2 config error,
3 numeric failure, 4 criterion inapplicable when a verdict was demanded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys

import numpy as np

from . import __version__
import scipy.linalg

from .algebra import (
    Ad_matrix,
    ad_matrix_raw,
    bracket,
    build_so_basis,
    build_su_basis,
    build_torus_basis,
    group_exp,
    project_h,
    project_h_perp,
)
from .curvature import (
    beta_constants,
    block_einstein_report,
    misiolek_scan,
    ricci_matrix,
    ricci_rigid_closed_form,
    sectional_numerator,
    sectional_numerator_arnold,
)
from .criteria import (
    cheeger_nonsteady_condition,
    commuting_block_scan,
    criterion_report_json,
    index_form_tau,
    nonsteady_frame,
    nonsteady_quadratic_criterion,
    steady_determinant_scan,
    steady_operators,
)
from .dynamics import (
    cheeger_geodesic_exact,
    closed_biinvariant_time,
    integrate_euler_arnold,
)
from .errors import ConfigError, CriterionInapplicableError, LieGeoError
from .jacobi import (
    closed_geodesic_conjugacy,
    find_conjugate_times,
    integrate_jacobi,
    solution_operator,
)
from .locus import berger_det, emit_locus_csv, emit_locus_svg, generate_locus_slice
from .metric import MetricOperator

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INAPPLICABLE = 4

CRITERIA = ("closed", "steady-det", "steady-blocks", "misiolek", "nonsteady-phi", "cheeger")

DEFAULTS = {
    "group": "so3",
    "metric": {"kind": "rigid-body", "mu": [1.0, 2.0, 3.0]},
    "u0": "e12",
    "T": 10.0,
    "dt": None,
    "criterion": None,
    "deltas": [-0.001, -0.25, -0.5, -0.75, -0.95],
    "angles": 720,
    "unit": "momentum",
    "seed": 0,
    "out": "out",
    "tolerances": {
        "sigma_rel_threshold": 1e-6,
        "time_tol": 1e-9,
        "steady_tol": 1e-10,
    },
}


# -- config handling -----------------------------------------------------------------


def normalize_config(raw):
    """Fill defaults and canonicalize; raises ConfigError on bad fields."""
    cfg = json.loads(json.dumps(DEFAULTS))
    for key, val in raw.items():
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config field {key!r}")
        if key in ("metric", "tolerances") and isinstance(val, dict):
            cfg[key] = {**cfg[key], **val} if key == "tolerances" else dict(val)
        else:
            cfg[key] = val
    for field in ("T", "dt"):
        if cfg[field] is not None:
            cfg[field] = float(cfg[field])
            if not np.isfinite(cfg[field]) or cfg[field] <= 0:
                raise ConfigError(f"{field} must be a positive finite number")
    if cfg["criterion"] is not None and cfg["criterion"] not in CRITERIA:
        raise ConfigError(f"criterion must be one of {CRITERIA}")
    cfg["angles"] = int(cfg["angles"])
    cfg["seed"] = int(cfg["seed"])
    cfg["deltas"] = [float(d) for d in cfg["deltas"]]
    if any(not np.isfinite(d) or d <= -1 for d in cfg["deltas"]):
        raise ConfigError("locus deltas must be finite and > -1")
    return cfg


def config_hash(cfg):
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()[:16]


def build_group(name):
    name = name.replace("(", "").replace(")", "").replace("_", "-").lower()
    if name == "berger-sphere":
        return build_su_basis(2, embed_so_subalgebra=True)
    m = re.fullmatch(r"so(\d+)", name)
    if m:
        return build_so_basis(int(m.group(1)))
    m = re.fullmatch(r"su(\d+)-with-so\d*", name)
    if m:
        return build_su_basis(int(m.group(1)), embed_so_subalgebra=True)
    m = re.fullmatch(r"su(\d+)", name)
    if m:
        return build_su_basis(int(m.group(1)))
    m = re.fullmatch(r"torus(\d+)", name)
    if m:
        return build_torus_basis(int(m.group(1)))
    raise ConfigError(f"unknown group {name!r}")


def build_metric(basis, spec):
    kind = spec.get("kind")
    try:
        if kind == "rigid-body":
            return MetricOperator.rigid_body(basis, spec["mu"])
        if kind == "diagonal":
            return MetricOperator.diagonal(basis, spec["lam"])
        if kind == "cheeger":
            return MetricOperator.cheeger(basis, spec["delta"])
        if kind == "generic":
            matrix = np.array(json.load(open(spec["matrix_file"]))["matrix"])
            return MetricOperator.generic(basis, matrix)
        if kind == "biinvariant":
            return MetricOperator.biinvariant(basis)
    except KeyError as exc:
        raise ConfigError(f"metric {kind!r} is missing field {exc}")
    except LieGeoError as exc:
        raise ConfigError(str(exc))
    raise ConfigError(f"unknown metric kind {kind!r}")


def build_initial(basis, spec):
    if isinstance(spec, str):
        try:
            return basis.element_by_label(spec)
        except KeyError as exc:
            raise ConfigError(str(exc))
    if isinstance(spec, dict):
        m = basis.subalgebra_dim
        if not m:
            raise ConfigError("p0/q0 split needs a group with a subalgebra")
        p0 = np.asarray(spec.get("p0", []), dtype=float)
        q0 = np.asarray(spec.get("q0", []), dtype=float)
        if p0.shape != (m,) or q0.shape != (basis.dim - m,):
            raise ConfigError(
                f"p0 must have length {m} and q0 length {basis.dim - m}"
            )
        return basis.element(np.concatenate([p0, q0]))
    coords = np.asarray(spec, dtype=float)
    if coords.shape != (basis.dim,):
        raise ConfigError(f"u0 must have {basis.dim} coordinates")
    return basis.element(coords)


def write_manifest(cfg, outdir, outputs):
    manifest = {
        "config": cfg,
        "config_hash": config_hash(cfg),
        "version": __version__,
        "seed": cfg["seed"],
        "threads": os.environ.get("LIEGEO_THREADS"),
        "outputs": sorted(outputs),
        "tolerances": cfg["tolerances"],
    }
    path = os.path.join(outdir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def _write_matrix_csv(path, matrix, header, chash):
    with open(path, "w") as fh:
        fh.write(f"# config_hash: {chash}\n")
        fh.write(header + "\n")
        for row in np.atleast_2d(matrix):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


# -- commands -------------------------------------------------------------------------


def cmd_curvature(cfg):
    basis = build_group(cfg["group"])
    metric = build_metric(basis, cfg["metric"])
    chash = config_hash(cfg)
    outdir = cfg["out"]
    os.makedirs(outdir, exist_ok=True)
    outputs = []
    ric = ricci_matrix(metric)
    path = os.path.join(outdir, "ricci.csv")
    _write_matrix_csv(path, ric.matrix, ",".join(basis.labels), chash)
    outputs.append(path)
    print(f"ricci matrix -> {path} (off-diagonal residual {ric.diagonality_residual:.3e})")
    if metric.variant == "cheeger" and basis.subalgebra_dim:
        report = block_einstein_report(metric)
        path = os.path.join(outdir, "block_einstein.json")
        with open(path, "w") as fh:
            json.dump({"config_hash": chash, **report}, fh, sort_keys=True, indent=2)
            fh.write("\n")
        outputs.append(path)
        print(
            f"block-Einstein -> {path} (C1={report['C1']:.6g}, C2={report['C2']:.6g}, "
            f"residual {report['residual']:.3e})"
        )
    outputs.append(write_manifest(cfg, outdir, outputs))
    return EXIT_OK


def cmd_geodesic(cfg):
    basis = build_group(cfg["group"])
    metric = build_metric(basis, cfg["metric"])
    u0 = build_initial(basis, cfg["u0"])
    traj = integrate_euler_arnold(metric, u0, cfg["T"], cfg["dt"])
    chash = config_hash(cfg)
    outdir = cfg["out"]
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "trajectory.csv")
    traj.export_csv(path, config_hash=chash)
    print(
        f"geodesic -> {path} (conservation drift {traj.conservation_drift():.3e})"
    )
    write_manifest(cfg, outdir, [path])
    return EXIT_OK


def _criterion_document(cfg, metric, u0):
    """Run the selected criterion; returns (json_text, had_verdict)."""
    name = cfg["criterion"]
    basis = metric.basis
    if name == "steady-det":
        crit = steady_operators(metric, u0)
        if crit.status != "applicable":
            raise CriterionInapplicableError(f"steady criterion: {crit.status}")
        report = steady_determinant_scan(crit, horizon=cfg["T"] / 2.0)
        return criterion_report_json(crit, report), True
    if name == "steady-blocks":
        data, report = commuting_block_scan(metric, u0)
        return criterion_report_json(data, report), True
    if name == "misiolek":
        scan = misiolek_scan(metric, u0, seed=cfg["seed"])
        doc = {
            "criterion": "misiolek",
            "status": scan.verdict(),
            "minimum": scan.minimum,
            "n_evaluated": scan.n_evaluated,
        }
        return criterion_report_json(doc), True
    if name == "cheeger":
        p0, q0 = project_h(u0), project_h_perp(u0)
        ok = cheeger_nonsteady_condition(metric.delta, p0, q0)
        doc = {
            "criterion": "cheeger",
            "status": "conjugate-point-guaranteed" if ok else "condition-violated",
            "delta": metric.delta,
        }
        return criterion_report_json(doc), True
    if name == "nonsteady-phi":
        traj = integrate_euler_arnold(metric, u0, cfg["T"], cfg["dt"])
        verdict, frame = nonsteady_quadratic_criterion(traj)
        extra = {}
        if verdict.verdict == "satisfied-on-horizon":
            extra["index_form_tau"] = index_form_tau(verdict.psi_min, verdict.phi_min)
        return criterion_report_json(verdict, **extra), True
    if name == "closed":
        traj = integrate_euler_arnold(metric, u0, cfg["T"], cfg["dt"])
        tau = closed_biinvariant_time(metric, u0, horizon=cfg["T"])
        if tau is None:
            doc = {"criterion": "closed", "status": "no-closed-time-on-horizon"}
            return criterion_report_json(doc), True
        verdict = closed_geodesic_conjugacy(traj, tau)
        doc = {
            "criterion": "closed",
            "status": "conjugate-at-or-before-tau"
            if verdict.conjugate_at_or_before_tau
            else "not-certified",
            "tau": verdict.tau,
            "isometry_ok": verdict.isometry_ok,
            "field_norm_at_tau": verdict.field_norm_at_tau,
        }
        return criterion_report_json(doc), True
    raise ConfigError(f"unknown criterion {name!r}")


def cmd_conjugate(cfg):
    basis = build_group(cfg["group"])
    metric = build_metric(basis, cfg["metric"])
    u0 = build_initial(basis, cfg["u0"])
    chash = config_hash(cfg)
    outdir = cfg["out"]
    os.makedirs(outdir, exist_ok=True)
    if cfg["criterion"] is None:
        traj = integrate_euler_arnold(metric, u0, cfg["T"], cfg["dt"])
        report = find_conjugate_times(
            traj,
            sigma_rel_threshold=cfg["tolerances"]["sigma_rel_threshold"],
            time_tol=cfg["tolerances"]["time_tol"],
        )
        doc = json.dumps(
            {"config_hash": chash, **report.to_json_dict()}, sort_keys=True
        )
    else:
        text, _ = _criterion_document(cfg, metric, u0)
        doc = json.dumps({"config_hash": chash, **json.loads(text)}, sort_keys=True)
    path = os.path.join(outdir, "conjugate.json")
    with open(path, "w") as fh:
        fh.write(doc + "\n")
    print(f"conjugate report -> {path}")
    print(doc)
    write_manifest(cfg, outdir, [path])
    return EXIT_OK


def cmd_steady(cfg):
    basis = build_group(cfg["group"])
    metric = build_metric(basis, cfg["metric"])
    u0 = build_initial(basis, cfg["u0"])
    chash = config_hash(cfg)
    outdir = cfg["out"]
    os.makedirs(outdir, exist_ok=True)
    crit = steady_operators(metric, u0)
    doc = {"config_hash": chash, "operators": crit.to_json_dict()}
    if crit.status == "applicable":
        scan = steady_determinant_scan(crit, horizon=cfg["T"] / 2.0)
        doc["determinant_scan"] = scan.to_json_dict()
    try:
        data, report = commuting_block_scan(metric, u0)
        doc["blocks"] = data.to_json_dict()
        doc["block_scan_times"] = report.times
    except CriterionInapplicableError as exc:
        doc["blocks"] = {"status": "inapplicable", "reason": str(exc)}
    scan = misiolek_scan(metric, u0, seed=cfg["seed"])
    doc["misiolek"] = {"minimum": scan.minimum, "status": scan.verdict()}
    path = os.path.join(outdir, "steady.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"steady analysis -> {path}")
    write_manifest(cfg, outdir, [path])
    return EXIT_OK


def cmd_locus(cfg):
    chash = config_hash(cfg)
    out = cfg["out"]
    if out.endswith(".svg"):
        svg_path, csv_path = out, out[:-4] + ".csv"
        outdir = os.path.dirname(out) or "."
        os.makedirs(outdir, exist_ok=True)
    else:
        os.makedirs(out, exist_ok=True)
        svg_path = os.path.join(out, "locus.svg")
        csv_path = os.path.join(out, "locus.csv")
        outdir = out
    slices = [
        generate_locus_slice(d, cfg["angles"], unit=cfg["unit"])
        for d in cfg["deltas"]
    ]
    emit_locus_csv(slices, csv_path, config_hash=chash)
    emit_locus_svg(slices, svg_path, config_hash=chash)
    print(f"locus -> {svg_path}, {csv_path} (unit: {cfg['unit']})")
    write_manifest(cfg, outdir, [svg_path, csv_path])
    return EXIT_OK


# -- verify: the oracle/invariant gate ------------------------------------------------


def _verify_checks(seed=0):
    """Yield (name, residual, bound) triples for the full oracle suite."""
    rng = np.random.default_rng(seed)

    so3 = build_so_basis(3)
    so4 = build_so_basis(4)
    su2 = build_su_basis(2, embed_so_subalgebra=True)
    su3 = build_su_basis(3, embed_so_subalgebra=True)

    # algebraic identities on every builder output
    for basis in (so3, so4, su2, su3):
        c = basis.structure_constants
        jac = (
            np.einsum("ijm,mkl->ijkl", c, c)
            + np.einsum("jkm,mil->ijkl", c, c)
            + np.einsum("kim,mjl->ijkl", c, c)
        )
        yield f"jacobi-identity {basis.name}", float(np.abs(jac).max()), 1e-12
        g = basis.biinv_gram
        adinv = np.einsum("ijm,mk->ijk", c, g) + np.einsum("ikm,jm->ijk", c, g)
        yield f"ad-invariance {basis.name}", float(np.abs(adinv).max()), 1e-12
        worst = 0.0
        for _ in range(100):
            x = basis.element(rng.standard_normal(basis.dim))
            y = basis.element(rng.standard_normal(basis.dim))
            comm = x.matrix() @ y.matrix() - y.matrix() @ x.matrix()
            worst = max(
                worst,
                float(np.abs(bracket(x, y).matrix() - comm).max()),
            )
        yield f"bracket-vs-commutator {basis.name}", worst, 1e-10

    # subalgebra split closure
    m = su3.subalgebra_dim
    c = su3.structure_constants
    yield "split [h,h] in h", float(np.abs(c[:m, :m, m:]).max()), 1e-12
    yield "split [h,hp] in hp", float(np.abs(c[:m, m:, :m]).max()), 1e-12

    # ad* duality for every metric variant
    metrics = [
        MetricOperator.rigid_body(so3, [1.0, 2.0, 3.0]),
        MetricOperator.diagonal(so4, rng.uniform(0.5, 3.0, so4.dim)),
        MetricOperator.cheeger(su3, -2.0 / 3.0),
    ]
    w = rng.standard_normal((so3.dim, so3.dim))
    metrics.append(MetricOperator.generic(so3, np.eye(so3.dim) + 0.1 * (w + w.T)))
    for metric in metrics:
        basis = metric.basis
        worst = 0.0
        for _ in range(100):
            u = basis.element(rng.standard_normal(basis.dim))
            v = basis.element(rng.standard_normal(basis.dim))
            z = basis.element(rng.standard_normal(basis.dim))
            lhs = metric.metric_inner(metric.ad_star(u, v), z)
            rhs = metric.metric_inner(v, bracket(u, z))
            worst = max(worst, abs(lhs - rhs))
        yield f"ad*-duality {metric.variant} {basis.name}", worst, 1e-11

    # exponential identities
    worst_ad, worst_mul = 0.0, 0.0
    for _ in range(10):
        x = so4.element(rng.standard_normal(so4.dim))
        t = float(rng.uniform(0, 5))
        lhs = Ad_matrix(group_exp(x, t))
        rhs = scipy.linalg.expm(t * ad_matrix_raw(so4, x.coords))
        worst_ad = max(worst_ad, float(np.abs(lhs - rhs).max()))
        s = float(rng.uniform(0, 3))
        prod = group_exp(x, s).matrix @ group_exp(x, t).matrix
        worst_mul = max(
            worst_mul, float(np.abs(group_exp(x, s + t).matrix - prod).max())
        )
    yield "Ad(exp) = exp(ad)", worst_ad, 1e-10
    yield "one-parameter subgroup", worst_mul, 1e-10

    # solution operator linearity
    metric = MetricOperator.rigid_body(so3, [1.0, 2.0, 3.0])
    u0 = so3.element([0.4, 0.3, 0.8])
    traj = integrate_euler_arnold(metric, u0, T=3.0, dt=2e-3)
    z1 = so3.element(rng.standard_normal(3))
    z2 = so3.element(rng.standard_normal(3))
    a, b = 0.7, -1.3
    y1 = integrate_jacobi(traj, so3.zero(), z1)
    y2 = integrate_jacobi(traj, so3.zero(), z2)
    y12 = integrate_jacobi(traj, so3.zero(), a * z1 + b * z2)
    lin = np.abs(a * y1.y_samples + b * y2.y_samples - y12.y_samples).max()
    yield "Omega linearity", float(lin), 1e-10

    # fourth-order convergence of the integrator
    ref = integrate_euler_arnold(metric, u0, T=2.0, dt=5e-4 / 4)
    e1 = integrate_euler_arnold(metric, u0, T=2.0, dt=2e-2)
    e2 = integrate_euler_arnold(metric, u0, T=2.0, dt=1e-2)
    err1 = np.linalg.norm(e1.velocities[-1] - ref.velocities[-1])
    err2 = np.linalg.norm(e2.velocities[-1] - ref.velocities[-1])
    order = np.log2(err1 / err2)
    yield "RK4 order (expect ~4)", float(abs(order - 4.0)), 0.5

    # conservation and momentum law
    yield "conservation drift", traj.conservation_drift(), 1e-9
    worst = 0.0
    for idx in range(0, len(traj.times), 300):
        g = traj.frame_at_index(idx)
        adj = metric.Ad_star_matrix(g.inverse())
        worst = max(
            worst,
            float(np.linalg.norm(adj @ traj.velocities[idx] - traj.velocities[0])),
        )
    yield "momentum conservation law", worst, 1e-8

    # frame orthogonality of (v1, v2, v3) on a nonsteady Zeitlin geodesic
    zmetric = MetricOperator.cheeger(su3, -2.0 / 3.0)
    coords = rng.standard_normal(su3.dim)
    coords /= np.linalg.norm(coords)
    ztraj = integrate_euler_arnold(zmetric, su3.element(coords), T=1.0, dt=1e-3)
    frame = nonsteady_frame(ztraj)
    yield "nonsteady frame orthogonality", frame.orthogonality_residual, 1e-8

    # exact Cheeger geodesic vs RK4
    bmetric = MetricOperator.cheeger(su2, -0.5)
    bu0 = su2.element([1.0, 0.8, -0.3])
    btraj = integrate_euler_arnold(bmetric, bu0, T=2.0, dt=5e-4)
    gref, uref = cheeger_geodesic_exact(bmetric, bu0, 2.0)
    yield (
        "Cheeger exact vs RK4",
        float(np.abs(btraj.frames[-1] - gref.matrix).max()),
        1e-8,
    )

    # closed-form vs numeric Ricci on so(3) and so(4)
    for basis, mu in ((so3, [1.0, 2.0, 3.0]), (so4, [1.0, 2.0, 3.0, 4.0])):
        metric = MetricOperator.rigid_body(basis, mu)
        ric = ricci_matrix(metric)
        closed = ricci_rigid_closed_form(basis.matrix_size, mu=mu)
        yield (
            f"ricci closed-vs-numeric {basis.name}",
            float(np.abs(np.diag(ric.matrix) - closed).max()),
            1e-10,
        )
        yield f"ricci diagonality {basis.name}", ric.diagonality_residual, 1e-10

    # Arnold formula vs the squared-form sectional formula
    metric = MetricOperator.diagonal(so4, rng.uniform(0.5, 3.0, so4.dim))
    worst = 0.0
    for _ in range(50):
        u = so4.element(rng.standard_normal(so4.dim))
        v = so4.element(rng.standard_normal(so4.dim))
        worst = max(
            worst,
            abs(sectional_numerator(metric, u, v) - sectional_numerator_arnold(metric, u, v)),
        )
    yield "sectional formula cross-check", worst, 1e-10

    # analytic vs numeric Berger determinant
    bmetric = MetricOperator.cheeger(su2, 1.0)
    bu0 = su2.element([1.0, 1.0, 0.0])
    btraj = integrate_euler_arnold(bmetric, bu0, T=2.0, dt=1e-3)
    samples = solution_operator(btraj)
    r4 = float(np.sqrt(5.0) ** 4)
    worst = 0.0
    for s in samples[:: len(samples) // 50]:
        worst = max(
            worst, abs(s.det - s.t / r4 * berger_det(s.t, 1.0, 1.0, 1.0))
        )
    yield "Berger determinant analytic-vs-numeric", worst, 1e-7

    # criterion cross-agreement on the unstable middle axis
    metric = MetricOperator.rigid_body(so3, [1.0, 2.0, 3.0])
    u0 = so3.element_by_label("e13")
    crit = steady_operators(metric, u0)
    scan = steady_determinant_scan(crit, horizon=4.0)
    data, block_rep = commuting_block_scan(metric, u0)
    t_first = block_rep.first_time()
    straj = integrate_euler_arnold(metric, u0, T=1.2 * t_first, dt=2e-3)
    num = find_conjugate_times(straj)
    yield (
        "criterion cross-agreement (middle axis)",
        float(
            max(
                abs(scan.first_time() - t_first),
                abs((num.first_time() or np.inf) - t_first),
            )
        ),
        1e-4,
    )

    # beta constants of the Zeitlin pair
    bg, bh = beta_constants(su3)
    yield "beta_G su(3) = 12", abs(bg - 12.0), 1e-9


def cmd_verify(cfg):
    failures = 0
    for name, residual, bound in _verify_checks(seed=cfg["seed"]):
        ok = residual < bound
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {residual:.3e} (bound {bound:g})")
        if not ok:
            failures += 1
    print(f"verify: {'all checks passed' if not failures else f'{failures} failures'}")
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


# -- argument parsing ------------------------------------------------------------------


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--group", help="so<n> | su<n> | su<n>-with-so<n> | berger-sphere | torus<k>")
    parser.add_argument(
        "--metric",
        nargs="+",
        help="rigid-body MU1,MU2,... | diagonal L1,L2,... | cheeger DELTA | biinvariant | generic FILE",
    )
    parser.add_argument("--u0", help="basis label (e12), coordinate list, or p0;q0")
    parser.add_argument("--T", type=float, help="time horizon")
    parser.add_argument("--dt", type=float, help="integrator step")
    parser.add_argument("--seed", type=int, help="PRNG seed for scans")
    parser.add_argument("--out", help="output directory (or .svg path for locus)")


def _parse_metric_tokens(tokens):
    kind = tokens[0]
    if kind in ("biinvariant",):
        return {"kind": kind}
    if len(tokens) < 2:
        raise ConfigError(f"metric {kind!r} needs a parameter")
    arg = tokens[1]
    if kind == "rigid-body":
        return {"kind": kind, "mu": [float(x) for x in arg.split(",")]}
    if kind == "diagonal":
        return {"kind": kind, "lam": [float(x) for x in arg.split(",")]}
    if kind == "cheeger":
        return {"kind": kind, "delta": float(arg)}
    if kind == "generic":
        return {"kind": kind, "matrix_file": arg}
    raise ConfigError(f"unknown metric kind {kind!r}")


def _parse_u0(text):
    if ";" in text:
        p0, q0 = text.split(";", 1)
        return {
            "p0": [float(x) for x in p0.split(",") if x],
            "q0": [float(x) for x in q0.split(",") if x],
        }
    if re.fullmatch(r"[a-z][a-z0-9]*", text):
        return text
    return [float(x) for x in text.split(",")]


def _fold_dashed_values(argv):
    """Join '--flag -0.5,...' into '--flag=-0.5,...' for list-valued flags.

    argparse only recognizes bare negative numbers, not comma lists that
    start with a minus sign.
    """
    out = []
    fold = {"--deltas", "--u0"}
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in fold and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="liegeo",
        description="geodesics, curvature and conjugate points on matrix Lie groups",
    )
    argv = _fold_dashed_values(list(argv))
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("curvature", "geodesic", "conjugate", "steady", "locus", "verify"):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "conjugate":
            p.add_argument("--criterion", choices=CRITERIA)
        if name == "locus":
            p.add_argument("--deltas", help="comma list of deformation parameters")
            p.add_argument("--angles", type=int, help="number of direction samples")
            p.add_argument("--unit", choices=("momentum", "biinvariant", "metric"))
    return parser.parse_args(argv)


def config_from_args(args):
    raw = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}")
    if args.group:
        raw["group"] = args.group
    if args.metric:
        raw["metric"] = _parse_metric_tokens(args.metric)
    if args.u0:
        raw["u0"] = _parse_u0(args.u0)
    for field in ("T", "dt", "seed", "out"):
        val = getattr(args, field, None)
        if val is not None:
            raw[field] = val
    if getattr(args, "criterion", None):
        raw["criterion"] = args.criterion
    if getattr(args, "deltas", None):
        raw["deltas"] = [float(x) for x in args.deltas.split(",")]
    if getattr(args, "angles", None):
        raw["angles"] = args.angles
    if getattr(args, "unit", None):
        raw["unit"] = args.unit
    return normalize_config(raw)


COMMANDS = {
    "curvature": cmd_curvature,
    "geodesic": cmd_geodesic,
    "conjugate": cmd_conjugate,
    "steady": cmd_steady,
    "locus": cmd_locus,
    "verify": cmd_verify,
}


def main(argv=None):
    args = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CriterionInapplicableError as exc:
        print(f"criterion inapplicable: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except LieGeoError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
