import argparse
import logging
import sys
from datetime import datetime
from typing import List, Optional, Sequence, Tuple

from src.logic.bijection import DEFECT_MODES
from src.logic.config import Config
from src.logic.controller import Controller
from src.logic.errors import InstanceError
from src.logic.helpers import CAMPAIGNS, SCHEMA_VERSION, TOOL_VERSION
from src.logic.instance import Instance
from src.logic.report import Report
from src.logic.storage import Storage

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def parse_profile(text: str) -> List[Tuple[int, int]]:
    """'3:0,2:1' -> [(3, 0), (2, 1)] as (valency, defect) per vertex."""
    try:
        out = []
        for item in text.split(","):
            valency, defect = item.split(":")
            out.append((int(valency), int(defect)))
        return out
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad profile {text!r}, expected valency:defect,...") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="feynsum", description="Exact graph sums, BD algebras and L-infinity checks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--file", type=str, default=None, help="instance JSON file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--window-words", type=int, default=None)
    common.add_argument("--window-gamma", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--stable-graphs", action="store_true", default=None)
    common.add_argument("--timings", action="store_true", default=None, help="record wall-clock timings")
    common.add_argument("--out", type=str, default=None, help="write the JSON report here")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list marked graph classes of a cell")
    p.add_argument("g", type=int, nargs="?", default=None)
    p.add_argument("n", type=int, nargs="?", default=None)
    p.add_argument("m", type=int, nargs="?", default=1)
    p.add_argument("--profile", type=parse_profile, default=None)

    p = sub.add_parser("verify", parents=[common], help="run a verification campaign")
    p.add_argument("--campaign", type=str, required=True, choices=CAMPAIGNS)
    p.add_argument("--defect-mode", type=str, default=None, choices=DEFECT_MODES)

    sub.add_parser("eval", parents=[common], help="evaluate the instance's listed maps")
    return parser


def load_instance(args: argparse.Namespace) -> Instance:
    data = Storage.load_instance(args.file) if args.file else {"schema_version": SCHEMA_VERSION}
    config = Config.from_dict(data.get("config", {})).overridden(
        seed=args.seed,
        window_words=args.window_words,
        window_gamma=args.window_gamma,
        jobs=args.jobs,
        stable_graphs=args.stable_graphs,
        record_timings=args.timings,
        defect_mode=getattr(args, "defect_mode", None),
    )
    return Instance.from_dict(data, config)


def run(argv: Optional[Sequence[str]] = None) -> Tuple[int, Optional[Report]]:
    args = build_parser().parse_args(argv)
    try:
        instance = load_instance(args)
        controller = Controller(instance)
        if args.command == "enumerate":
            if args.profile is not None and args.m == 1 and len(args.profile) > 1:
                args.m = len(args.profile)
            report = controller.cmd_enumerate(args.g, args.n, args.m, args.profile)
        elif args.command == "verify":
            report = controller.cmd_verify(args.campaign)
        else:
            report = controller.cmd_eval()
    except (InstanceError, FileNotFoundError) as e:
        logger.error(f"[CLI][{datetime.now()}] input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT, None
    except ValueError as e:
        # profile, grading and presentation errors raised while reading the input
        logger.error(f"[CLI][{datetime.now()}] invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT, None

    print(report.summary())
    if args.out:
        controller.save_report(report, args.out)
    return (EXIT_PASS if report.passed else EXIT_FAIL), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
