import logging
import multiprocessing as mp
import random
import time
from logging.handlers import RotatingFileHandler
from dataclasses import replace
from datetime import datetime
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from src.logic.bd import (
    BDPresentation, FreeBVData, TruncationWindow, check_bd_axioms, free_closed_sector, induced_dgla, laplacian_checks,
    tensor_bd, trivialized,
)
from src.logic.bijection import feasible_cells, verify_gt_bijection
from src.logic.element import Element
from src.logic.enumeration import enumerate_graphs
from src.logic.errors import InstanceError, PresentationError
from src.logic.feynman import ContractionKernel, KFamily, k_morphism, oc_family, taylor_K
from src.logic.graded import Letter
from src.logic.helpers import CAMPAIGNS, LOG_FILE
from src.logic.indexer import GraphIndex, graph_label
from src.logic.instance import Instance
from src.logic.instances import (
    gauge_instance, kil_instance, random_chain_bv, random_inputs, random_kernel, random_space, random_w,
)
from src.logic.linfty import (
    broken_bracket_example, check_coalgebra_intertwining, dgla_to_coderivation, square_zero_check,
)
from src.logic.report import Check, Report
from src.logic.storage import Storage
from src.logic.verify import (
    certify_bdr, certify_kil, reduction_chain, verify_aut_weights, verify_bvinf, verify_easy_lemma,
    verify_key_lemma,
)

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.DEBUG)

MAX_BVINF_HALF_EDGES = 8
MAX_ORACLE_HALF_EDGES = 6


def sample_rng(seed: int, k: int) -> random.Random:
    return random.Random(seed * 1_000_003 + k)


def tagged(check: Check, tag: str) -> Check:
    return replace(check, name=f"{tag} {check.name}")


def run_tasks(fn: Callable, tasks: Sequence, jobs: int, desc: str) -> list:
    """Ordered map over tasks, on a process pool when jobs > 1."""
    if jobs > 1 and len(tasks) > 1:
        with mp.Pool(processes=jobs) as pool:
            return list(tqdm(pool.imap(fn, tasks), total=len(tasks), desc=desc, disable=None))
    return [fn(t) for t in tqdm(tasks, desc=desc, disable=None)]


def mutation_checks(A: BDPresentation, window: TruncationWindow, data: Optional[FreeBVData] = None,
                    limit: Optional[int] = None) -> List[Check]:
    """
    Flip single bracket entries and differentials of A; the axiom checks must
    catch each flip that breaks the structure. With the generating data of A,
    every entry is flipped and a flip must be caught exactly when the flipped
    data is invalid. Without it, only off-diagonal bracket entries are flipped
    and every one must be caught.
    """
    by_key = lambda p: (p[0].sort_key(), p[1].sort_key())
    pairs = sorted((p for p in A.bracket_gen if data is not None or p[0] != p[1]), key=by_key)
    targets = [("bracket", (a.name, b.name)) for a, b in pairs]
    if data is not None:
        targets += [("differential", (a.name,)) for a in sorted(A.d_gen, key=Letter.sort_key)]
    out = []
    for kind, names in targets[:limit]:
        failed = [c.name for c in check_bd_axioms(A.mutated(kind, *names), window) if not c.passed]
        valid = False
        if data is not None:
            try:
                data.flipped(kind, *names)
                valid = True
            except PresentationError:
                pass
        out.append(Check(f"mutation {A.name}:{kind}({','.join(names)})", bool(failed) != valid,
                         {"detected_by": failed, "still_valid": valid}))
    return out


# ---------------- per-sample workers ----------------

def _gt_cell(cell: Tuple[int, int, int, int, int], mode: str, max_half_edges: int) -> Check:
    g, n, k1, k2, m = cell
    return verify_gt_bijection(g, n, k1, k2, m, mode=mode, max_half_edges=max_half_edges)


def _bvinf_sample(k: int, seed: int, d: int) -> List[Check]:
    rng = sample_rng(seed, k)
    space = random_space(rng, rng.randint(1, 4), "x")
    kernel = random_kernel(rng, space, d)
    m = rng.randint(2, 3)
    while True:
        inputs = random_inputs(rng, space, d, m, max_len=3)
        if sum(x.max_word_length() for x in inputs) <= MAX_BVINF_HALF_EDGES:
            break
    i, j = rng.sample(range(1, m + 1), 2)
    family = KFamily(kernel)
    checks = [verify_bvinf(inputs, i, j, kernel, family)]
    if sum(x.max_word_length() for x in inputs) <= MAX_ORACLE_HALF_EDGES:
        checks.append(verify_aut_weights(inputs, kernel, family))
    return [tagged(c, f"#{k}") for c in checks]


def _key_lemma_sample(k: int, seed: int, d: int, window: TruncationWindow) -> List[Check]:
    rng = sample_rng(seed, k)
    space = random_space(rng, rng.randint(2, 4), "x")
    kernel = random_kernel(rng, space, d)
    W = random_w(rng, d, rng.randint(2, 6), window)
    m = rng.randint(2, 3)
    xs = random_inputs(rng, space, d, m, max_len=2, max_gamma=1)
    ys = random_inputs(rng, W.space, d, m, max_len=2, max_gamma=0)
    checks = check_bd_axioms(W, window) + [
        certify_bdr(W),
        verify_easy_lemma(ys, [0], W),
        verify_key_lemma(list(zip(xs, ys)), kernel, W),
    ]
    return [tagged(c, f"#{k}") for c in checks]


def _bd_sample(k: int, seed: int, d: int, window: TruncationWindow) -> List[Check]:
    rng = sample_rng(seed, k)
    data = random_chain_bv(rng, d, rng.randint(2, 5))
    W = free_closed_sector(data, window, name="W")
    other = random_w(rng, d, 2, TruncationWindow(3, 1), prefix="z")
    checks = check_bd_axioms(W, window)
    checks += check_bd_axioms(tensor_bd(W.with_window(TruncationWindow(3, 1)), other), TruncationWindow(3, 1))
    if k < 3:
        checks += mutation_checks(W, TruncationWindow(3, 1), data)
    return [tagged(c, f"#{k}") for c in checks]


def _linfty_sample(k: int, seed: int, d: int) -> List[Check]:
    rng = sample_rng(seed, k)
    W = random_w(rng, d, rng.randint(2, 4), TruncationWindow(3, 1))
    Q = dgla_to_coderivation(induced_dgla(W))
    return [tagged(c, f"#{k}") for c in square_zero_check(Q, W.basis(max_words=2, min_words=1), 3, 3)]


class Controller:
    """Runs enumerations, verification campaigns and evaluations on one instance."""

    def __init__(self, instance: Instance) -> None:
        logger.debug(f"[Controller][{datetime.now()}] Initializing Controller for {instance.name!r}...")
        self.instance = instance
        self.config = instance.config
        self.campaigns: Dict[str, Callable[[Report], None]] = {
            "gt-bijection": self._gt_bijection,
            "bd-axioms": self._bd_axioms,
            "linfty": self._linfty,
            "bvinf": self._bvinf,
            "key-lemma": self._key_lemma,
            "commutation": self._commutation,
        }

    # ------------ reports ------------

    def _report(self, campaign: str, **params) -> Report:
        return Report(
            campaign,
            params={"config": self.config.to_dict(), **params},
            seed=self.config.seed,
            input_digest=self.instance.digest(),
        )

    def _timed(self, report: Report, key: str, fn: Callable[[], None]) -> None:
        start = time.perf_counter()
        fn()
        if self.config.record_timings:
            report.timings[key] = round(time.perf_counter() - start, 6)

    def report_dict(self, report: Report) -> dict:
        return report.to_dict(with_timings=self.config.record_timings)

    def save_report(self, report: Report, path: str) -> None:
        Storage.save_report(path, self.report_dict(report))
        logger.info(f"[Controller][{datetime.now()}] Report {report.campaign} saved to {path}.")

    # ------------ commands ------------

    def cmd_enumerate(self, g: Optional[int], n: Optional[int], m: int,
                      profile: Optional[Sequence[Tuple[int, int]]] = None) -> Report:
        report = self._report("enumerate", g=g, n=n, m=m, profile=[list(p) for p in profile] if profile else None,
                              stable=self.config.stable_graphs)

        def run():
            classes = enumerate_graphs(g, n, m, profile=profile, stable=self.config.stable_graphs)
            index = GraphIndex(classes)
            report.payload["classes"] = [
                dict(cls.to_dict(), label=graph_label(cls.graph)) for cls in classes
            ]
            report.payload["aut_table"] = index.aut_table()
            report.add(Check("enumerate", True, {"classes": len(classes)}))
            logger.info(f"[Controller][{datetime.now()}] Enumerated {len(classes)} classes for g={g} n={n} m={m}.")

        self._timed(report, "enumerate", run)
        return report

    def cmd_verify(self, campaign: str) -> Report:
        if campaign not in self.campaigns:
            logger.error(f"[Controller][{datetime.now()}] Unknown campaign {campaign!r}")
            raise InstanceError(f"Unknown campaign {campaign!r}; expected one of {CAMPAIGNS}")
        report = self._report(campaign, samples=self.instance.samples, sweep=self.instance.sweep)
        self._timed(report, campaign, lambda: self.campaigns[campaign](report))
        logger.info(f"[Controller][{datetime.now()}] {campaign}: {len(report.checks) - len(report.failures())}"
                    f"/{len(report.checks)} checks passed.")
        return report

    def cmd_eval(self) -> Report:
        inst = self.instance
        if not inst.evaluations:
            raise InstanceError("The instance lists no evaluations")
        report = self._report("eval", evaluations=[e.name for e in inst.evaluations])

        def run():
            kernel = self._kernel()
            family = KFamily(kernel, stable=self.config.stable_graphs)
            for ev in inst.evaluations:
                inputs = [inst.element(name) for name in ev.inputs]
                if ev.map == "K":
                    value = taylor_K(len(inputs), [self._closed_input(x, name) for x, name in zip(inputs, ev.inputs)],
                                     kernel, family)
                else:
                    if inst.w is None:
                        raise InstanceError(f"Evaluation {ev.name} needs a w section")
                    if len(inputs) > 4:
                        raise InstanceError(f"Evaluation {ev.name}: the open-closed family stops at arity 4")
                    value = oc_family(kernel, inst.w).apply(len(inputs), inputs)
                report.payload[ev.name] = value.to_dict()
                report.add(Check(f"eval {ev.name}", True, {"map": ev.map, "inputs": ev.inputs, "value": repr(value)}))

        self._timed(report, "eval", run)
        return report

    # ------------ instance helpers ------------

    def _kernel(self) -> ContractionKernel:
        inst = self.instance
        if inst.closed is None:
            raise InstanceError("Evaluations of K need a closed section")
        return inst.kernel or ContractionKernel(inst.closed.space, self.config.d)

    def _closed_input(self, x: Element, name: str) -> Element:
        try:
            return x.promote(self.instance.closed.space)
        except ValueError as e:
            raise InstanceError(f"Input {name} of K has letters outside the closed space") from e

    def _closed_and_kernel(self):
        inst = self.instance
        if inst.closed is not None:
            kernel = inst.kernel or ContractionKernel(inst.closed.space, self.config.d)
            return inst.closed, kernel
        if self.config.d != 3:
            raise InstanceError(f"Campaigns at d={self.config.d} need a closed section in the instance")
        return kil_instance(self.config.d)

    def _w(self, window: TruncationWindow) -> BDPresentation:
        if self.instance.w is not None:
            return self.instance.w.with_window(window)
        return random_w(sample_rng(self.config.seed, 0), self.config.d, 2, window)

    # ------------ campaigns ------------

    def _gt_bijection(self, report: Report) -> None:
        cells = list(feasible_cells(**self.instance.sweep))
        worker = partial(_gt_cell, mode=self.config.defect_mode, max_half_edges=self.instance.sweep["max_half_edges"])
        checks = run_tasks(worker, cells, self.config.jobs, "gt-bijection")
        report.extend(checks)
        report.payload["table"] = [
            {"cell": list(cell), "A": c.details.get("A"), "B": c.details.get("B"), "C": c.details.get("C")}
            for cell, c in zip(cells, checks)
        ]

    def _bd_axioms(self, report: Report) -> None:
        inst, window = self.instance, self.config.window
        data, _, _ = gauge_instance(self.config.d) if self.config.d == 3 else (None, None, None)
        fixed: List[Tuple[BDPresentation, Optional[FreeBVData]]] = []
        if data is not None:
            fixed.append((free_closed_sector(data, window, name="gauge"), data))
            report.extend(laplacian_checks(data, window))
        if inst.closed is not None:
            fixed.append((inst.closed_presentation(), inst.closed))
            report.extend(tagged(c, "closed") for c in laplacian_checks(inst.closed, window))
        if inst.w is not None:
            fixed.append((inst.w.with_window(window), None))
        if inst.closed is not None and inst.w is not None:
            small = TruncationWindow(min(3, window.max_words), 1)
            fixed.append((tensor_bd(inst.closed_presentation().with_window(small), inst.w.with_window(small)), None))
        for A, generating in fixed:
            report.extend(check_bd_axioms(A, window))
            report.extend(mutation_checks(A, window, generating, limit=None if generating else 3))
        worker = partial(_bd_sample, seed=self.config.seed, d=self.config.d, window=window)
        for checks in run_tasks(worker, list(range(inst.samples["bd_axioms"])), self.config.jobs, "bd-axioms"):
            report.extend(checks)

    def _linfty(self, report: Report) -> None:
        inst, d = self.instance, self.config.d
        small = TruncationWindow(3, 1)
        presentations = []
        if d == 3:
            data, _, _ = gauge_instance(d)
            presentations.append(free_closed_sector(data, small, name="gauge"))
        if inst.closed is not None:
            presentations.append(free_closed_sector(inst.closed, small))
        if inst.w is not None:
            presentations.append(inst.w.with_window(small))
        for A in presentations:
            view = induced_dgla(A)
            report.extend(square_zero_check(dgla_to_coderivation(view), A.basis(max_words=2, min_words=1), 3, 3))
            letters = A.basis(max_words=1, min_words=1)
            bad = next(((a, b, c) for a in letters for b in letters for c in letters
                        if not view.jacobi_unshifted(a, b, c).is_zero()), None)
            report.add(Check(f"{A.name}:jacobi-unshifted", bad is None, {"letters": len(letters)},
                             None if bad is None else {"inputs": [x.to_dict() for x in bad]}))

        Q, basis = broken_bracket_example(d)
        broken = square_zero_check(Q, basis, 3)
        report.add(Check("mutation broken:square-zero", [c.passed for c in broken] == [True, True, False],
                         {c.name: c.passed for c in broken}))

        closed, kernel = self._closed_and_kernel()
        closed_A = free_closed_sector(closed, small)
        report.add(certify_kil(closed_A, trivialized(closed, small, "t"), kernel, 3, 3))
        letters = closed_A.basis(max_words=1, min_words=1)[:3]
        report.add(Check("K:coalgebra-intertwining", check_coalgebra_intertwining(k_morphism(kernel, 3), letters),
                         {"inputs": len(letters)}))

        worker = partial(_linfty_sample, seed=self.config.seed, d=d)
        for checks in run_tasks(worker, list(range(inst.samples["linfty"])), self.config.jobs, "linfty"):
            report.extend(checks)

    def _bvinf(self, report: Report) -> None:
        inst, d = self.instance, self.config.d
        if d == 3:
            data, kernel = kil_instance(d)
            A = free_closed_sector(data, self.config.window)
            fixed = [
                [A.word(["p"]), A.word(["u"])],
                [A.word(["q"]), A.word(["t", "u"]), A.word(["p"])],
            ]
            family = KFamily(kernel)
            for inputs in fixed:
                for i in range(1, len(inputs) + 1):
                    for j in range(1, len(inputs) + 1):
                        if i != j:
                            report.add(tagged(verify_bvinf(inputs, i, j, kernel, family), "fixed"))
        if inst.closed is not None and inst.kernel is not None:
            rng = sample_rng(self.config.seed, -1)
            family = KFamily(inst.kernel)
            for k in range(20):
                m = rng.randint(2, 3)
                inputs = random_inputs(rng, inst.closed.space, d, m, max_len=2)
                i, j = rng.sample(range(1, m + 1), 2)
                report.add(tagged(verify_bvinf(inputs, i, j, inst.kernel, family), f"instance#{k}"))
        worker = partial(_bvinf_sample, seed=self.config.seed, d=d)
        for checks in run_tasks(worker, list(range(inst.samples["bvinf"])), self.config.jobs, "bvinf"):
            report.extend(checks)

    def _key_lemma(self, report: Report) -> None:
        inst, d = self.instance, self.config.d
        small = TruncationWindow(3, 1)
        if inst.closed is not None and inst.kernel is not None and inst.w is not None:
            rng = sample_rng(self.config.seed, -1)
            W = inst.w.with_window(small)
            for k in range(10):
                m = rng.randint(2, 3)
                xs = random_inputs(rng, inst.closed.space, d, m, max_len=2, max_gamma=0)
                ys = random_inputs(rng, W.space, d, m, max_len=2, max_gamma=0)
                report.add(tagged(verify_key_lemma(list(zip(xs, ys)), inst.kernel, W), f"instance#{k}"))
        worker = partial(_key_lemma_sample, seed=self.config.seed, d=d, window=small)
        for checks in run_tasks(worker, list(range(inst.samples["key_lemma"])), self.config.jobs, "key-lemma"):
            report.extend(checks)

    def _commutation(self, report: Report) -> None:
        window = TruncationWindow(min(3, self.config.window_words), 1)
        data, kernel = self._closed_and_kernel()
        W = self._w(window)
        rng = sample_rng(self.config.seed, -2)
        xs = [Element.monomial(data.space, data.d, (l,)) for l in data.space.letters]
        ys = [Element.monomial(W.space, W.d, (l,)) for l in W.space.letters]
        key_inputs = [[(rng.choice(xs), rng.choice(ys)) for _ in range(2)] for _ in range(self.instance.samples["chain"])]
        checks = reduction_chain(data, kernel, W, key_inputs, window)
        report.extend(checks)
        report.payload["closed"] = data.to_dict()
        report.payload["kernel"] = kernel.to_dict()
        report.payload["w"] = W.to_dict()
