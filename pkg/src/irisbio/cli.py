"""Command-line front end: segment, enroll, verify, identify, eval, synth.

Exit codes: 0 success or accept, 1 reject, 2 any error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import PipelineConfig
from .edgedetect import canny
from .errors import EmptyInput, IrisError, SpecInvalid
from .imgcore import (
    compute_histogram,
    gaussian_blur,
    load_pgm,
    match_histogram,
    reference_histogram,
    save_binary_pgm,
    save_pgm,
    threshold_binary,
)
from .localize import CircleParams, open_mask
from .matching import enroll, identify, make_record, match_with_shifts, score_distribution, verify
from .pipeline import overlay_boundaries, process_file
from .synth import EyeSpec, format_truth, perturb, render_eye

log = logging.getLogger("irisbio")

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2

STAGE_NAMES = (
    "01_matched",
    "02_blur",
    "03_thresh",
    "04_edges",
    "05_boundaries_overlay",
    "06_strip",
    "07_mask",
)


class CliError(Exception):
    pass


# --------------------------------------------------------------------- helpers


def _load_config(args) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    if getattr(args, "method", None):
        cfg = cfg.replace(method=args.method)
    if getattr(args, "threshold", None) is not None:
        cfg = cfg.replace(match_threshold=args.threshold)
    return cfg


def _reference(args):
    if not args.reference_image:
        return None
    return compute_histogram(load_pgm(args.reference_image))


def _dump_stages(out_dir, image, result, cfg, reference) -> None:
    os.makedirs(out_dir, exist_ok=True)
    st = result.stages
    if st is not None:
        matched, blurred, dark, edges = st.matched, st.blurred, st.dark, st.edges
    else:
        # the IDOP path has no Hough stages; rebuild the same pre-processing
        matched = match_histogram(image, reference or reference_histogram())
        blurred = gaussian_blur(matched, cfg.blur_sigma, cfg.blur_kernel)
        dark = open_mask(threshold_binary(blurred, cfg.pupil_threshold), cfg.pupil_open_radius)
        edges = canny(np.where(dark, 255, 0).astype(np.uint8), cfg.canny_low, cfg.canny_high, cfg.canny_sigma)
    path = lambda name: os.path.join(out_dir, name + ".pgm")  # noqa: E731
    save_pgm(matched, path("01_matched"))
    save_pgm(blurred, path("02_blur"))
    save_binary_pgm(dark, path("03_thresh"))
    save_binary_pgm(edges, path("04_edges"))
    save_pgm(overlay_boundaries(image, result.boundaries), path("05_boundaries_overlay"))
    save_pgm(result.strip.strip, path("06_strip"))
    save_binary_pgm(result.strip.mask, path("07_mask"))


def _fmt_circle(name: str, c: CircleParams) -> str:
    return f"{name} {c.cx:.4f} {c.cy:.4f} {c.r:.4f}"


# -------------------------------------------------------------------- commands


def cmd_segment(args) -> int:
    cfg = _load_config(args)
    reference = _reference(args)
    result = process_file(args.input, cfg, reference, keep_stages=args.emit_stages)
    print(_fmt_circle("pupil", result.boundaries.pupil))
    print(_fmt_circle("limbic", result.boundaries.limbic))
    print(f"elapsed_seconds {result.elapsed:.4f}")
    print(f"quality {result.quality:.4f}")
    if args.emit_stages:
        _dump_stages(args.out_dir, load_pgm(args.input), result, cfg, reference)
    return EXIT_OK


def cmd_enroll(args) -> int:
    cfg = _load_config(args)
    result = process_file(args.input, cfg, _reference(args))
    enroll(args.db, make_record(args.id, result.code, result.boundaries), overwrite=args.overwrite)
    print(f"enrolled {args.id}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    result = process_file(args.input, cfg, _reference(args))
    m = verify(args.db, args.id, result.strip, cfg.match_threshold, cfg.shifts, cfg.min_overlap)
    print(f"hd={m.hd:.4f} shift={m.best_shift} decision={m.decision}")
    return EXIT_OK if m.accepted else EXIT_REJECT


def cmd_identify(args) -> int:
    cfg = _load_config(args)
    result = process_file(args.input, cfg, _reference(args))
    ranked = identify(args.db, result.strip, cfg.match_threshold, cfg.shifts, cfg.min_overlap)
    if not ranked:
        raise CliError("no enrolled template overlaps the probe")
    for subject, m in ranked[: args.top] if args.top else ranked:
        print(f"{subject} {m.hd:.4f}")
    return EXIT_OK


def read_pair_list(path) -> list[tuple[str, str]]:
    """Whitespace-separated ``probe gallery`` paths, one pair per line; ``#`` starts a comment.

    Relative paths resolve against the list file's directory.
    """
    base = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read pair list {path}: {exc}") from exc
    pairs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CliError(f"{path}:{lineno}: expected two image paths")
        pairs.append(tuple(os.path.join(base, p) for p in parts))
    return pairs


def _score_pair(job):
    probe, gallery, cfg, reference = job
    try:
        a = process_file(probe, cfg, reference)
        b = process_file(gallery, cfg, reference)
        return match_with_shifts(a.strip, b.code, cfg.shifts, cfg.match_threshold, cfg.min_overlap).hd, None
    except (IrisError, OSError) as exc:
        return None, f"{probe} vs {gallery}: {exc}"


def _score_pairs(pairs, cfg, reference, jobs: int) -> list[float]:
    work = [(p, g, cfg, reference) for p, g in pairs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_score_pair, work))
    else:
        outcomes = [_score_pair(w) for w in work]
    scores = []
    for hd, err in outcomes:  # input order is preserved
        if err is None:
            scores.append(hd)
        else:
            log.warning("skipping pair %s", err)
    return scores


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    reference = _reference(args)
    genuine_pairs = read_pair_list(args.genuine)
    imposter_pairs = read_pair_list(args.imposter)
    if not genuine_pairs or not imposter_pairs:
        raise EmptyInput("both pair lists must name at least one pair")
    genuine = _score_pairs(genuine_pairs, cfg, reference, args.jobs)
    imposter = _score_pairs(imposter_pairs, cfg, reference, args.jobs)
    if not genuine and not imposter:
        raise CliError("every pair failed")
    dist = score_distribution(genuine, imposter)
    text = dist.to_csv()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}") from exc
        print(f"genuine={len(genuine)} imposter={len(imposter)} dprime={dist.dprime:.4f}")
    if args.scores_dir:
        os.makedirs(args.scores_dir, exist_ok=True)
        for name, scores in (("genuine", genuine), ("imposter", imposter)):
            with open(os.path.join(args.scores_dir, name + ".txt"), "w", encoding="utf-8") as fh:
                fh.writelines(f"{v!r}\n" for v in scores)
    return EXIT_OK


def _spec_from_args(args) -> EyeSpec:
    base = EyeSpec()
    try:
        pupil = CircleParams(
            base.pupil.cx if args.pupil_cx is None else args.pupil_cx,
            base.pupil.cy if args.pupil_cy is None else args.pupil_cy,
            base.pupil.r if args.pupil_r is None else args.pupil_r,
        )
    except ValueError as exc:
        raise SpecInvalid(str(exc)) from exc
    specular = None
    if args.specular:
        try:
            specular = tuple(float(v) for v in args.specular.split(","))
        except ValueError as exc:
            raise SpecInvalid("specular must be cx,cy,r,intensity") from exc
    spec = EyeSpec(
        width=args.width,
        height=args.height,
        pupil=pupil,
        limbic_r=args.limbic_r,
        identity_seed=args.seed,
        noise_seed=args.noise_seed,
        specular=specular,
    ).validate()
    if args.dilation:
        spec = perturb(spec, "dilation", args.dilation)
    if args.rotation:
        spec = perturb(spec, "rotation", args.rotation)
    if args.noise:
        spec = perturb(spec, "noise", args.noise)
    if args.eyelashes:
        spec = perturb(spec, "clutter", args.eyelashes)
    return spec


def cmd_synth(args) -> int:
    image, truth = render_eye(_spec_from_args(args))
    save_pgm(image, args.out)
    if args.truth_out:
        try:
            with open(args.truth_out, "w", encoding="utf-8") as fh:
                fh.write(format_truth(truth))
        except OSError as exc:
            raise CliError(f"cannot write {args.truth_out}: {exc}") from exc
    return EXIT_OK


# ---------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irisbio", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value config file overriding the defaults")
    p.add_argument("--print-config", action="store_true", help="print every effective setting")
    p.add_argument("--reference-image", help="PGM whose histogram replaces the built-in reference")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("segment", help="localize both boundaries of one image")
    s.add_argument("input")
    s.add_argument("--out-dir", default=".", help="where stage dumps go")
    s.add_argument("--emit-stages", action="store_true", help="write numbered stage PGMs")
    s.add_argument("--method", choices=("cht", "idop"))
    s.set_defaults(func=cmd_segment)

    s = sub.add_parser("enroll", help="add an image's template to a store")
    s.add_argument("input")
    s.add_argument("--id", required=True)
    s.add_argument("--db", required=True)
    s.add_argument("--overwrite", action="store_true")
    s.add_argument("--method", choices=("cht", "idop"))
    s.set_defaults(func=cmd_enroll)

    s = sub.add_parser("verify", help="1:1 match against an enrolled subject")
    s.add_argument("input")
    s.add_argument("--id", required=True)
    s.add_argument("--db", required=True)
    s.add_argument("--threshold", type=float)
    s.add_argument("--method", choices=("cht", "idop"))
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("identify", help="rank every enrolled subject")
    s.add_argument("input")
    s.add_argument("--db", required=True)
    s.add_argument("--top", type=int, default=0, help="print only the best N (0 = all)")
    s.add_argument("--method", choices=("cht", "idop"))
    s.set_defaults(func=cmd_identify)

    s = sub.add_parser("eval", help="FAR/FRR table from genuine and imposter pair lists")
    s.add_argument("genuine")
    s.add_argument("imposter")
    s.add_argument("--out", required=True, help="CSV path, or - for stdout")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--scores-dir", help="also write genuine.txt and imposter.txt, one score per line")
    s.add_argument("--method", choices=("cht", "idop"))
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("synth", help="render a synthetic eye with ground truth")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--truth-out")
    s.add_argument("--width", type=int, default=320)
    s.add_argument("--height", type=int, default=280)
    s.add_argument("--pupil-cx", type=float)
    s.add_argument("--pupil-cy", type=float)
    s.add_argument("--pupil-r", type=float)
    s.add_argument("--limbic-r", type=float, default=110.0)
    s.add_argument("--dilation", type=float, default=0.0, help="pixels added to the pupil radius")
    s.add_argument("--rotation", type=float, default=0.0, help="radians, counterclockwise")
    s.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma")
    s.add_argument("--noise-seed", type=int, default=0)
    s.add_argument("--eyelashes", type=int, default=0)
    s.add_argument("--specular", help="cx,cy,r,intensity")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    warnings.formatwarning = lambda msg, category, *_a, **_k: f"irisbio: warning: {msg}\n"
    try:
        if args.print_config:
            sys.stdout.write(_load_config(args).to_text())
        if args.command is None:
            if args.print_config:
                return EXIT_OK
            parser.print_usage(sys.stderr)
            return EXIT_ERROR
        return args.func(args)
    except (IrisError, CliError, OSError, ValueError) as exc:
        print(f"irisbio {args.command or ''}: error: {exc}".replace("  ", " "), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
