"""Command-line interface.

Subcommands: sample, figure1, gram, classify, fakeuni.  Every command is
deterministic given --seed and its flags; the generator is numpy's
PCG64, so a seed reproduces output byte for byte.  CSV output uses a
header row, '.' as the decimal separator, 17 significant digits, LF
line endings, and UTF-8.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import classifier, distributions, fake_uniformity, moments, radon, so3
from .errors import DomainError, NoConvergence, OutOfRange

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NOCONV = 4

MODAL_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class RunConfig:
    seed: int
    family: str
    kappa: float
    modal: np.ndarray
    tol: float
    output_path: str | None


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_csv(stream, header, rows):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _open_out(path):
    return open(path, "w", encoding="utf-8", newline="\n")


def _orthonormalise(M: np.ndarray) -> np.ndarray:
    # Polar factor via SVD, with the determinant forced positive.
    U, _, Vt = np.linalg.svd(M)
    R = U @ Vt
    if np.linalg.det(R) < 0.0:
        U[:, -1] *= -1.0
        R = U @ Vt
    return R


def _parse_modal(entries: str | None, axis: str | None, angle: float | None) -> np.ndarray:
    """Modal rotation from either an axis-angle pair (preferred) or nine
    row-major entries re-orthonormalised by polar decomposition."""
    if axis is not None or angle is not None:
        if axis is None or angle is None:
            raise DomainError("axis-angle input needs both --modal-axis and --modal-angle")
        vec = np.array([float(v) for v in axis.split(",")], dtype=float)
        if vec.shape != (3,):
            raise DomainError("--modal-axis expects three comma-separated values")
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise DomainError("--modal-axis must be nonzero")
        return so3.from_axis_angle(vec / norm, float(angle))
    if entries is None:
        return np.eye(3)
    values = [float(v) for v in entries.split(",")]
    if len(values) != 9:
        raise DomainError("--modal expects nine comma-separated entries, row-major")
    M = np.array(values, dtype=float).reshape(3, 3)
    if not so3.is_rotation(M, tol=MODAL_ORTHO_TOL):
        raise DomainError("modal matrix is not orthonormal within %g" % MODAL_ORTHO_TOL)
    return _orthonormalise(M)


def _family_kappa(args) -> tuple[distributions.Family, float]:
    family = distributions.Family(args.family)
    if family is distributions.Family.HAAR and args.kappa != 0.0:
        raise DomainError("the haar family has no concentration; omit --kappa")
    return family, args.kappa


def _build_spec(config: RunConfig, family: distributions.Family) -> distributions.DistributionSpec:
    return distributions.DistributionSpec(family, modal=config.modal, kappa=config.kappa)


def _run_config(args) -> RunConfig:
    modal = _parse_modal(
        getattr(args, "modal", None),
        getattr(args, "modal_axis", None),
        getattr(args, "modal_angle", None),
    )
    return RunConfig(
        seed=args.seed,
        family=args.family,
        kappa=args.kappa,
        modal=modal,
        tol=args.tol,
        output_path=getattr(args, "out", None),
    )


def _chunked_mc(fn, n: int, seed: int, threads: int):
    """Split an MC task into per-thread streams.  threads == 1 keeps the
    single-stream bitwise contract; more threads spawn child generators
    (still deterministic, but a different stream than one thread)."""
    if threads <= 1:
        return fn(n, np.random.default_rng(seed))
    seqs = np.random.SeedSequence(seed).spawn(threads)
    counts = [n // threads] * threads
    counts[0] += n - sum(counts)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda sc: fn(sc[0], np.random.default_rng(sc[1])), zip(counts, seqs)))
    return sum(c * p for c, p in zip(counts, parts)) / n


def cmd_sample(args) -> int:
    config = _run_config(args)
    if args.n < 1:
        raise DomainError("--n must be >= 1")
    family, _ = _family_kappa(args)
    spec = _build_spec(config, family)
    rng = np.random.default_rng(config.seed)
    P, axes, angles, x = distributions.sample_rotations(spec, args.n, rng, return_parts=True)
    header = ["r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33",
              "theta", "u1", "u2", "u3", "x"]
    rows = (
        [float(v) for v in P[i].reshape(-1)]
        + [float(angles[i]), float(axes[i, 0]), float(axes[i, 1]), float(axes[i, 2]), float(x[i])]
        for i in range(args.n)
    )
    if config.output_path:
        with _open_out(config.output_path) as fh:
            _write_csv(fh, header, rows)
    else:
        _write_csv(sys.stdout, header, rows)
    return EXIT_OK


def cmd_figure1(args) -> int:
    if args.kappa_max <= 0.0:
        raise DomainError("--kappa-max must be positive")
    if args.n_points < 2:
        raise DomainError("--n-points must be >= 2")
    quad = moments.QuadratureSpec(abs_tol=args.tol)
    cay = fake_uniformity.scan_curve("cayley", args.kappa_max, args.n_points, quad)
    fvm = fake_uniformity.scan_curve("fvm", args.kappa_max, args.n_points, quad)
    rows = [[p.kappa, p.tau2_minus_third, q.tau2_minus_third] for p, q in zip(cay, fvm)]
    with _open_out(args.out) as fh:
        _write_csv(fh, ["kappa", "cayley", "fvm"], rows)
    print("wrote %s (%d rows)" % (args.out, len(rows)))
    return EXIT_OK


def _load_landmarks(path: str) -> np.ndarray:
    """The 3 x k landmark matrix, stored row-major and headerless: three
    CSV rows, one landmark per column."""
    try:
        raw = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError:
        raise
    except Exception as exc:
        raise ValueError("could not parse landmark CSV: %s" % exc) from exc
    if raw.ndim != 2 or raw.shape[0] != 3 or raw.shape[1] < 1:
        raise ValueError("landmark CSV must hold a 3 x k matrix (three rows)")
    if not np.all(np.isfinite(raw)):
        raise ValueError("landmark CSV contains non-finite entries")
    return raw


def _print_matrix(label: str, G: np.ndarray) -> None:
    print(label)
    for row in G:
        print("  " + "  ".join(_fmt(v) for v in row))


def cmd_gram(args) -> int:
    config = _run_config(args)
    if args.n_mc < 1:
        raise DomainError("--n-mc must be >= 1")
    family, _ = _family_kappa(args)
    try:
        V = _load_landmarks(args.landmarks)
    except (OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    spec = _build_spec(config, family)
    closed = radon.expected_projected_gram(spec, V)
    mc = _chunked_mc(
        lambda n, rng: radon.mc_projected_gram(spec, V, n, rng),
        args.n_mc, config.seed, args.threads,
    )
    deviation = mc - closed
    naive_bias = 1.5 * closed - radon.gram(V)
    _print_matrix("closed-form expected projected Gram:", closed)
    _print_matrix("monte-carlo estimate (n=%d):" % args.n_mc, mc)
    _print_matrix("entrywise deviation (mc - closed):", deviation)
    _print_matrix("naive uniform-law recovery bias (1.5 E - Gram(V)):", naive_bias)
    print("max |deviation| = %s" % _fmt(np.max(np.abs(deviation))))
    print("max |naive bias| = %s" % _fmt(np.max(np.abs(naive_bias))))
    if config.output_path:
        k = V.shape[1]
        rows = []
        for name, G in (("closed", closed), ("mc", mc), ("bias", naive_bias)):
            for i in range(k):
                for j in range(k):
                    rows.append([name, i, j, float(G[i, j])])
        with _open_out(config.output_path) as fh:
            _write_csv(fh, ["block", "i", "j", "value"], rows)
        print("wrote %s" % config.output_path)
    return EXIT_OK


def cmd_classify(args) -> int:
    config = _run_config(args)
    if args.n_mc < 1:
        raise DomainError("--n-mc must be >= 1")
    m2 = _parse_modal(args.modal2, args.modal2_axis, args.modal2_angle)
    angle = so3.rotation_angle_between(config.modal, m2)
    if angle < 1e-9 or angle > math.pi - 1e-9:
        raise DomainError("modal rotations coincide or are a half-turn apart; "
                          "the separation angle must lie in (0, pi)")
    family, kappa = _family_kappa(args)
    common = distributions.DistributionSpec(family, kappa=kappa)
    pair = classifier.ClassPair(m1=config.modal, m2=m2, common=common)
    psi = classifier.psi_closed(pair)
    dpsi = classifier.psi_derivative(pair)
    acc = _chunked_mc(
        lambda n, rng: classifier.mc_accuracy(pair, n, rng),
        args.n_mc, config.seed, args.threads,
    )
    stderr = math.sqrt(max(acc * (1.0 - acc), 1e-300) / args.n_mc)
    print("alpha = %s" % _fmt(pair.alpha))
    print("psi_closed = %s" % _fmt(psi))
    print("psi_derivative = %s" % _fmt(dpsi))
    print("mc_accuracy = %s (n=%d)" % (_fmt(acc), args.n_mc))
    print("mc_stderr = %s" % _fmt(stderr))
    print("gap |closed - mc| = %s" % _fmt(abs(psi - acc)))
    return EXIT_OK


def cmd_fakeuni(args) -> int:
    if args.kappa_max <= 0.0:
        raise DomainError("--kappa-max must be positive")
    family = args.family
    slope = fake_uniformity.initial_slope(family)
    points = fake_uniformity.scan_curve(family, args.kappa_max, args.n_points)
    roots = []
    for left, right in zip(points[1:-1], points[2:]):
        if left.tau2_minus_third == 0.0:
            roots.append(left.kappa)
        elif left.tau2_minus_third * right.tau2_minus_third < 0.0:
            root = fake_uniformity.find_fake_uniformity(family, left.kappa, right.kappa, args.tol)
            if root is not None:
                roots.append(root)
    if points[-1].tau2_minus_third == 0.0:
        roots.append(points[-1].kappa)
    print("family = %s" % family)
    print("initial_slope = %s" % _fmt(slope))
    if roots:
        print("fake-uniformity roots: " + ", ".join(_fmt(r) for r in roots))
    else:
        print("fake-uniformity roots: none in (0, %s]" % _fmt(args.kappa_max))
    if args.out:
        rows = [[p.kappa, p.tau2_minus_third] for p in points]
        with _open_out(args.out) as fh:
            _write_csv(fh, ["kappa", "tau2_minus_third"], rows)
        print("curve written to %s" % args.out)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, with_modal: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=0, help="PCG64 seed (default 0)")
    parser.add_argument("--family", choices=["haar", "cayley", "fvm"], default="haar")
    parser.add_argument("--kappa", type=float, default=0.0, help="concentration (>= 0)")
    parser.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    parser.add_argument("--threads", type=int, default=1,
                        help="MC worker streams; 1 (default) is the bitwise-reproducible mode")
    if with_modal:
        parser.add_argument("--modal", help="nine row-major rotation entries, comma-separated")
        parser.add_argument("--modal-axis", help="modal rotation axis 'x,y,z' (preferred input)")
        parser.add_argument("--modal-angle", type=float, help="modal rotation angle in radians")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotgram",
        description="Random-rotation shape transforms: sampling, fake-uniformity "
                    "curves, projected-Gram experiments, and the two-class Bayes "
                    "accuracy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw rotations and emit one CSV row per draw")
    _add_common(p)
    p.add_argument("--n", type=int, required=True, help="number of draws")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("figure1", help="tau2(kappa) - 1/3 curves for both families")
    p.add_argument("--kappa-max", type=float, required=True)
    p.add_argument("--n-points", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("gram", help="closed-form vs MC projected Gram on a landmark file")
    _add_common(p)
    p.add_argument("--landmarks", required=True,
                   help="headerless CSV holding the 3 x k landmark matrix "
                        "(three rows, one landmark per column)")
    p.add_argument("--n-mc", type=int, default=100000)
    p.add_argument("--out", help="optional CSV path for the closed/mc/bias blocks")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("classify", help="closed-form and MC accuracy for two modal rotations")
    _add_common(p)
    p.add_argument("--modal2", help="second modal rotation, nine entries")
    p.add_argument("--modal2-axis", help="second modal rotation axis 'x,y,z'")
    p.add_argument("--modal2-angle", type=float, help="second modal rotation angle")
    p.add_argument("--n-mc", type=int, default=100000)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fakeuni", help="initial slope and fake-uniformity roots of tau2(kappa)")
    p.add_argument("--family", choices=["cayley", "fvm"], default="cayley")
    p.add_argument("--kappa-max", type=float, required=True)
    p.add_argument("--n-points", type=int, default=129)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", help="optional CSV path for the curve")
    p.set_defaults(func=cmd_fakeuni)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, OutOfRange, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    except NoConvergence as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
