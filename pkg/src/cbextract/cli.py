"""Command line: simulate | extract | normals.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 numerical degeneracy (some board poses could not be converted).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys

import numpy as np

from . import io
from .bnb import PUSH_RULES, BnbConfig, extract
from .bounds import MODES
from .model import BoardPose, DegeneratePoseError, RigidTransform, normals_from_pose
from .objective import PackedScene
from .synth import SynthConfig, generate, load_poses

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DEGENERATE = 0, 1, 2, 3

log = logging.getLogger("cbextract")


class UsageError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def synth_config(path=None, zero_noise=False, seed=None):
    """SynthConfig from an optional JSON file of field overrides."""
    fields = {f.name for f in dataclasses.fields(SynthConfig)}
    kw = {}
    if path is not None:
        data = _load_json(path)
        if not isinstance(data, dict):
            raise UsageError(f"{path}: expected a JSON object")
        unknown = set(data) - fields
        if unknown:
            raise UsageError(f"{path}: unknown config keys {sorted(unknown)}")
        kw = dict(data)
        if "gt" in kw:
            kw["gt"] = RigidTransform(kw["gt"]["rotvec"], kw["gt"]["translation"])
    if zero_noise:
        kw.update(range_noise=0.0, normal_noise_deg=0.0)
    if seed is not None:
        kw["seed"] = seed
    try:
        return SynthConfig(**kw)
    except (TypeError, ValueError, KeyError) as exc:
        raise UsageError(f"bad simulation config: {exc}") from exc


def cmd_simulate(args):
    cfg = synth_config(args.config, args.zero_noise, args.seed)
    try:
        poses = load_poses(args.poses)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad poses file: {exc}") from exc
    scene = generate(cfg, poses)
    io.SceneFile.from_scene(scene).write(args.output)
    print(f"{scene.n_points} points, {scene.n_board_points} on boards, "
          f"{len(scene.scans)} scans -> {args.output}")
    return EXIT_OK


def bnb_config(args):
    try:
        return BnbConfig(
            eps=args.eps,
            init_rot_half=math.radians(args.rot_half),
            init_trans_half=args.trans_half,
            mode=args.mode,
            max_iterations=args.max_iter,
            stall_window=args.stall,
            min_inliers=args.min_inliers,
            push_rule=args.push_rule,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def precision_recall(labels, inliers):
    """Point-level precision and recall of extracted inliers against labels."""
    truth = {(i, int(j)) for i, lab in enumerate(labels) for j in np.flatnonzero(np.asarray(lab) >= 0)}
    found = {(i, j) for i, scan in enumerate(inliers) for j, _ in scan}
    tp = len(truth & found)
    return tp, len(found), len(truth)


def cmd_extract(args):
    cfg = bnb_config(args)
    try:
        scene = io.SceneFile.read(args.scene)
    except io.FormatError as exc:
        raise UsageError(f"{args.scene}: {exc}") from exc
    packed = PackedScene(scene.scans, scene.images, cfg.eps)
    result = extract(scene.scans, scene.images, cfg, n_jobs=args.jobs, packed=packed)
    out = io.ResultFile.from_result(result)
    if args.output:
        out.write(args.output)
    print(f"Q* = {result.best_q} after {result.iterations} iterations ({result.terminated_by})")
    print("rotvec = " + np.array2string(result.best.rotvec, precision=5))
    print("translation = " + np.array2string(result.best.translation, precision=5))
    if scene.labels is not None:
        tp, n_found, n_true = precision_recall(scene.labels, out.inliers)
        print(f"precision {tp}/{n_found}, recall {tp}/{n_true}")
    return EXIT_OK


def cmd_normals(args):
    data = _load_json(args.poses)
    items = data["poses"] if isinstance(data, dict) else data
    boards, failed = [], []
    for i, item in enumerate(items):
        try:
            obs = normals_from_pose(BoardPose(item["R"], item["t"]), args.dx, args.dy)
        except DegeneratePoseError as exc:
            log.warning("pose %d: %s", i, exc)
            failed.append(i)
            boards.append({"index": i, "degenerate": True, "error": str(exc)})
            continue
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"pose {i}: {exc}") from exc
        boards.append({"index": i, "degenerate": False, **io._board_dict(obs)})
    text = io.dumps({"boards": boards})
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if failed:
        print(f"{len(failed)} of {len(items)} poses degenerate: {failed}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cbextract", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate a synthetic scene file")
    s.add_argument("--config", help="JSON file overriding SynthConfig fields")
    s.add_argument("--poses", help="board poses JSON (default: the bundled six poses)")
    s.add_argument("--zero-noise", action="store_true", help="disable range and normal noise")
    s.add_argument("--seed", type=int)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("extract", help="run branch-and-bound on a scene file")
    e.add_argument("scene")
    e.add_argument("--eps", type=float, default=0.07, help="inlier margin, meters")
    e.add_argument("--rot-half", type=float, default=15.0, help="root rotation half size, degrees")
    e.add_argument("--trans-half", type=float, default=1.0, help="root translation half size, meters")
    e.add_argument("--mode", choices=MODES, default="tight")
    e.add_argument("--max-iter", type=int)
    e.add_argument("--stall", type=int, help="stop after this many iterations without improvement")
    e.add_argument("--min-inliers", type=int, default=0)
    e.add_argument("--push-rule", choices=PUSH_RULES, default="strictly_greater")
    e.add_argument("--jobs", type=int, default=1, help="worker threads for bounding")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_extract)

    n = sub.add_parser("normals", help="convert board poses to N vectors")
    n.add_argument("poses")
    n.add_argument("--dx", type=float, default=0.75, help="board half height, meters")
    n.add_argument("--dy", type=float, default=0.75, help="board half width, meters")
    n.add_argument("-o", "--output")
    n.set_defaults(func=cmd_normals)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
