"""Named verification suites, each binding one certified property to a
reproducible seeded run with a JSON report.

Reports are deterministic for a fixed configuration: per-case seeds are
derived as seed XOR case-index and all randomness flows through numpy
Generators.  Wall time is recorded but excluded from determinism claims.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement, matrix_units
from .errors import ConfigInvalid, UnknownSuite
from .expectation import (
    construct_expectation,
    interpolation_gap,
    takesaki_invariant,
)
from .isometry import (
    build_isometry,
    classify,
    extract_polar_data,
    isometry_defect,
    star_adjoint_dual,
    transfer_exponent,
    verify_state_restriction,
)
from .lp import LpVector, clarkson_defect, lp_norm, state_power
from .samples import (
    random_element,
    random_isometry_data,
    random_invariant_inclusion,
    random_noninvariant_inclusion,
    random_yeadon_triple,
    rng_for,
    transpose_triple,
)
from .yeadon import (
    build_yeadon_map,
    jordan_dichotomy_report,
    projection_polar_parts,
    yeadon_decompose,
)

SCHEMA = "nclp/1"


@dataclass
class SuiteConfig:
    suite: str
    seed: int = 0
    sizes: list | None = None
    exponents: list | None = None
    sample_count: int | None = None
    tolerances: dict | None = None

    def resolved(self) -> "SuiteConfig":
        if self.suite not in SUITES:
            raise UnknownSuite(f"no suite named {self.suite!r}; known: {sorted(SUITES)}")
        defaults = SUITE_DEFAULTS[self.suite]
        out = SuiteConfig(
            suite=self.suite,
            seed=int(self.seed),
            sizes=self.sizes if self.sizes is not None else defaults.get("sizes"),
            exponents=(
                list(self.exponents) if self.exponents is not None else defaults.get("exponents")
            ),
            sample_count=(
                int(self.sample_count)
                if self.sample_count is not None
                else defaults.get("sample_count")
            ),
            tolerances=dict(defaults.get("tolerances", {})),
        )
        if self.tolerances:
            out.tolerances.update(self.tolerances)
        if out.sample_count is not None and out.sample_count < 1:
            raise ConfigInvalid("sample_count must be positive")
        if self.suite in _P_NE_2_SUITES and out.exponents:
            if any(abs(float(p) - 2.0) < 1e-12 for p in out.exponents):
                raise ConfigInvalid(f"suite {self.suite!r} excludes p = 2")
        if out.exponents:
            if any(float(p) < 1.0 for p in out.exponents):
                raise ConfigInvalid("exponents must be >= 1")
        return out

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "sizes": self.sizes,
            "exponents": self.exponents,
            "sample_count": self.sample_count,
            "tolerances": self.tolerances,
        }


@dataclass
class SuiteReport:
    suite: str
    config: SuiteConfig
    property: str
    cases: list = field(default_factory=list)
    passed: bool = False
    wall_time_s: float = 0.0

    def to_json(self, include_timing: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "suite": self.suite,
            "property": self.property,
            "config": self.config.to_json(),
            "cases": self.cases,
            "pass": bool(self.passed),
        }
        if include_timing:
            out["wall_time_s"] = float(self.wall_time_s)
        return out

    def dumps(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json(include_timing=include_timing), indent=1)


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:12]


def _case_seed(seed: int, index: int) -> int:
    return int(seed) ^ int(index)


def run_suite(config: SuiteConfig) -> SuiteReport:
    config = config.resolved()
    start = time.perf_counter()
    cases, passed = SUITES[config.suite](config)
    report = SuiteReport(
        suite=config.suite,
        config=config,
        property=SUITE_PROPERTIES[config.suite],
        cases=cases,
        passed=passed,
        wall_time_s=time.perf_counter() - start,
    )
    return report


# -- clarkson ---------------------------------------------------------------------


def _orthogonal_pair(algebra_blocks, p, rng):
    """A pair with exactly disjoint left and right supports.

    Each block is either split along a coordinate rectangle (h in the top
    left, k in the strictly complementary bottom right) or handed entirely
    to one side; the mode draw is retried until both sides are nonempty
    whenever the block structure allows it.
    """
    from .algebra import Algebra

    alg = Algebra(tuple(algebra_blocks))
    splittable = any(n >= 2 for n in alg.blocks)
    two_sided_possible = splittable or len(alg.blocks) >= 2
    for _ in range(64):
        modes = []
        for n in alg.blocks:
            modes.append(int(rng.integers(0, 3)) if n >= 2 else int(rng.integers(1, 3)))
        has_h = any(m in (0, 1) for m in modes)
        has_k = any(m in (0, 2) for m in modes)
        if (has_h and has_k) or not two_sided_possible:
            break
    h_blocks = alg.zero_blocks()
    k_blocks = alg.zero_blocks()
    for bidx, (n, mode) in enumerate(zip(alg.blocks, modes)):
        g1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if mode == 0:
            rows = int(rng.integers(1, n))
            cols = int(rng.integers(1, n))
            h_blocks[bidx][:rows, :cols] = g1[:rows, :cols]
            k_blocks[bidx][rows:, cols:] = g2[rows:, cols:]
        elif mode == 1:
            h_blocks[bidx][:, :] = g1
        else:
            k_blocks[bidx][:, :] = g2
    return LpVector(alg, p, h_blocks), LpVector(alg, p, k_blocks)


def _suite_clarkson(config: SuiteConfig):
    tol = config.tolerances
    per_p: dict[float, dict] = {}
    count = config.sample_count
    sizes = config.sizes
    exps = [float(p) for p in config.exponents]
    for i in range(count):
        rng = rng_for(_case_seed(config.seed, i))
        p = exps[i % len(exps)]
        blocks = sizes[i % len(sizes)]
        rec = per_p.setdefault(
            p, {"p": p, "orthogonal": 0, "overlapping": 0, "max_orthogonal_defect": 0.0, "min_overlap_defect": float("inf")}
        )
        h, k = _orthogonal_pair(blocks, p, rng)
        res = clarkson_defect(h, k)
        rec["orthogonal"] += 1
        rec["max_orthogonal_defect"] = max(rec["max_orthogonal_defect"], res.defect)
        # overlapping pair: normalized, resampled until clearly overlapping
        from .algebra import Algebra

        alg = Algebra(tuple(blocks))
        for _ in range(64):
            h2 = LpVector.from_element(random_element(alg, rng), p)
            k2 = LpVector.from_element(random_element(alg, rng), p)
            h2 = h2 * (1.0 / lp_norm(h2))
            k2 = k2 * (1.0 / lp_norm(k2))
            res2 = clarkson_defect(h2, k2)
            if res2.witness > tol["witness_min"]:
                break
        rec["overlapping"] += 1
        rec["min_overlap_defect"] = min(rec["min_overlap_defect"], res2.defect)
    cases = []
    passed = True
    for p in sorted(per_p):
        rec = per_p[p]
        ok = (
            rec["max_orthogonal_defect"] < tol["orthogonal_defect"]
            and rec["min_overlap_defect"] > tol["overlap_defect"]
        )
        passed = passed and ok
        rec["digest"] = _digest({"suite": "clarkson", "p": p, "seed": config.seed})
        rec["pass"] = ok
        cases.append(rec)
    return cases, passed


# -- yeadon ------------------------------------------------------------------------


def _suite_yeadon_roundtrip(config: SuiteConfig):
    tol = config.tolerances
    exps = [float(p) for p in config.exponents]
    cases = []
    passed = True
    for i in range(config.sample_count):
        p = exps[i % len(exps)]
        seed = _case_seed(config.seed, i)
        triple, weights = random_yeadon_triple(seed, p)
        T = build_yeadon_map(triple, p, weights)
        back = yeadon_decompose(T, p, weights)
        dist = max(
            float(np.max(np.abs(back.J.matrix - triple.J.matrix))),
            (back.w - triple.w).frobenius(),
            (back.B - AlgebraElement._raw(back.B.algebra, triple.B.data)).frobenius(),
        )
        # orthogonality propagation and additivity on a random orthogonal pair
        rng = rng_for(seed + 1)
        src = triple.J.source
        bidx = int(rng.integers(0, len(src.blocks)))
        n = src.blocks[bidx]
        orth = 0.0
        if n >= 2:
            from .samples import haar_unitary

            v = haar_unitary(n, rng)
            e_blocks = src.zero_blocks()
            f_blocks = src.zero_blocks()
            e_blocks[bidx] = np.outer(v[:, 0], v[:, 0].conj())
            f_blocks[bidx] = np.outer(v[:, 1], v[:, 1].conj())
            e = AlgebraElement(src, e_blocks)
            f = AlgebraElement(src, f_blocks)
            we, Be = projection_polar_parts(T, e)
            wf, Bf = projection_polar_parts(T, f)
            wef, Bef = projection_polar_parts(T, e + f)
            orth = max(
                (Be @ Bf).frobenius(),
                (we.adjoint() @ wf).frobenius(),
                (we @ wf.adjoint()).frobenius(),
                (Bef - (Be + Bf)).frobenius(),
                (wef - (we + wf)).frobenius(),
            )
        ok = dist < tol["roundtrip"] and orth < tol["orthogonality"]
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "p": p,
                "digest": _digest({"suite": "yeadon", "seed": seed, "p": p}),
                "roundtrip_distance": dist,
                "orthogonality_defect": orth,
                "pass": ok,
            }
        )
    return cases, passed


def _suite_dichotomy(config: SuiteConfig):
    tol = config.tolerances
    exps = [float(p) for p in config.exponents]
    cases = []
    passed = True
    for i in range(config.sample_count):
        p = exps[i % len(exps)]
        seed = _case_seed(config.seed, i)
        n = 2 + (i % 2)
        triple, weights = transpose_triple(n=n, seed=seed if i % 3 else None)
        rep = jordan_dichotomy_report(triple, p, weights, tol=tol["two_isometry"])
        bound = 2.0 - 4.0 ** (1.0 / p) - tol["witness_slack"]
        ok = (
            rep.kind == "jordan_only"
            and rep.isometry_defect < tol["isometry"]
            and not rep.multiplicative
            and rep.two_isometry_defect > tol["two_isometry"]
            and rep.witness_defect >= bound
            and rep.biconditional_holds
        )
        # multiplicative control at the same exponent
        ctrl, cweights = random_yeadon_triple(seed, p, spec=[(2, "mult", 1, 0)])
        crep = jordan_dichotomy_report(ctrl, p, cweights, tol=tol["two_isometry"])
        ok = ok and crep.multiplicative and crep.two_isometry_defect < tol["two_isometry"]
        ok = ok and crep.biconditional_holds
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "p": p,
                "digest": _digest({"suite": "dichotomy", "seed": seed, "p": p, "n": n}),
                "transpose_kind": rep.kind,
                "witness_defect": rep.witness_defect,
                "witness_bound": bound,
                "control_kind": crep.kind,
                "control_two_isometry_defect": crep.two_isometry_defect,
                "pass": ok,
            }
        )
    return cases, passed


# -- classification ------------------------------------------------------------------


def _roundtrip_distance(data, report) -> float:
    rec = report.data
    return max(
        float(np.max(np.abs(rec.pi.matrix - data.pi.matrix))),
        (rec.w - data.w).frobenius(),
        float(np.max(np.abs(rec.expectation.map.matrix - data.expectation.map.matrix))),
        (rec.phibar.density - data.phibar.density).frobenius(),
    )


def _suite_classify_roundtrip(config: SuiteConfig):
    tol = config.tolerances
    exps = [float(p) for p in config.exponents]
    cases = []
    passed = True
    for i in range(config.sample_count):
        p = exps[i % len(exps)]
        seed = _case_seed(config.seed, i)
        data = random_isometry_data(seed)
        T = build_isometry(data, p)
        report = classify(T, data.reference_state, p)
        dist = _roundtrip_distance(data, report) if report.accepted else float("inf")
        ok = report.accepted and dist < tol["distance"]
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "p": p,
                "digest": _digest({"suite": "classify", "seed": seed, "p": p}),
                "verdict": report.verdict,
                "defects": {k: float(v) for k, v in report.defects.items()},
                "recovered_distance": dist,
                "pass": ok,
            }
        )
    return cases, passed


def _suite_state_restriction(config: SuiteConfig):
    tol = config.tolerances
    exps = [float(p) for p in config.exponents]
    cases = []
    passed = True
    for i in range(config.sample_count):
        p = exps[i % len(exps)]
        seed = _case_seed(config.seed, i)
        data = random_isometry_data(seed)
        T = build_isometry(data, p)
        w, phibar = extract_polar_data(T, data.reference_state, p)
        defect = verify_state_restriction(phibar, data.pi, data.reference_state)
        # perturbed state must be detected
        rng = rng_for(seed + 5)
        g = random_element(data.source, rng, hermitian=True)
        drift = data.pi(g)
        drift = drift * (0.1 / max(drift.frobenius(), 1e-12))
        raw = phibar.density + drift
        blocks = []
        for blk in raw.data:
            ww, vv = np.linalg.eigh((blk + blk.conj().T) / 2)
            blocks.append((vv * np.clip(ww, 1e-8, None)) @ vv.conj().T)
        from .algebra import State

        perturbed = State(data.target, blocks, normalize=True)
        bad = verify_state_restriction(perturbed, data.pi, data.reference_state)
        ok = defect < tol["defect"] and bad > tol["perturbed_min"]
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "p": p,
                "digest": _digest({"suite": "restriction", "seed": seed, "p": p}),
                "restriction_defect": defect,
                "perturbed_defect": bad,
                "pass": ok,
            }
        )
    return cases, passed


def _suite_interpolation(config: SuiteConfig):
    tol = config.tolerances
    exps = [float(p) for p in config.exponents]
    cases = []
    passed = True
    n_incl = max(4, config.sample_count // 100)
    per_incl = max(1, config.sample_count // (n_incl * len(exps)))
    total = 0
    violations = 0
    worst = 0.0
    for j in range(n_incl):
        seed = _case_seed(config.seed, j)
        if j % 2 == 0:
            A, phibar = random_invariant_inclusion(seed)
        else:
            A, phibar = random_noninvariant_inclusion(seed)
        small = A.decomposition.algebra
        rng = rng_for(seed + 77)
        min_gap = float("inf")
        for p in exps:
            for _ in range(per_incl):
                x = random_element(small, rng)
                gap = interpolation_gap(A, phibar, x, p)
                total += 1
                min_gap = min(min_gap, gap)
                worst = min(worst, gap)
                if gap < -tol["violation"]:
                    violations += 1
        cases.append(
            {
                "case": j,
                "digest": _digest({"suite": "interpolation", "seed": seed}),
                "samples": per_incl * len(exps),
                "min_gap": min_gap,
                "pass": min_gap >= -tol["violation"],
            }
        )
    passed = violations == 0
    cases.append(
        {
            "case": "aggregate",
            "total_samples": total,
            "violations": violations,
            "worst_gap": worst,
            "pass": passed,
        }
    )
    return cases, passed


def _suite_duality(config: SuiteConfig):
    tol = config.tolerances
    exps = [float(p) for p in config.exponents]
    cases = []
    passed = True
    for i in range(config.sample_count):
        p = exps[i % len(exps)]
        pp = p / (p - 1.0)
        seed = _case_seed(config.seed, i)
        data = random_isometry_data(seed)
        Tp = build_isometry(data, p)
        Tpp = build_isometry(data, pp)
        dual = star_adjoint_dual(Tpp, pp)
        resid = float(
            np.max(np.abs(dual.matrix @ Tp.matrix - np.eye(Tp.source.total_dim)))
        )
        ok = resid < tol["identity"]
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "p": p,
                "digest": _digest({"suite": "duality", "seed": seed, "p": p}),
                "composition_residual": resid,
                "pass": ok,
            }
        )
    return cases, passed


def _suite_extrapolation(config: SuiteConfig):
    tol = config.tolerances
    qs = [float(q) for q in config.exponents]
    cases = []
    passed = True
    for i in range(config.sample_count):
        seed = _case_seed(config.seed, i)
        data = random_isometry_data(seed)
        T3 = build_isometry(data, 3.0)
        premise = isometry_defect(T3, 3.0, seed=seed)
        defects = {}
        for q in qs:
            Tq = transfer_exponent(
                data.pi, data.reference_state, data.phibar, data.w, q
            )
            defects[str(q)] = isometry_defect(Tq, q, seed=seed)
        ok = premise < tol["defect"] and all(v < tol["defect"] for v in defects.values())
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "digest": _digest({"suite": "extrapolation", "seed": seed}),
                "premise_defect_p3": premise,
                "transfer_defects": defects,
                "pass": ok,
            }
        )
    return cases, passed


def _suite_lemma41(config: SuiteConfig):
    tol = config.tolerances
    cases = []
    passed = True
    n_data = 8
    per = max(1, config.sample_count // n_data)
    for i in range(n_data):
        seed = _case_seed(config.seed, i)
        data = random_isometry_data(seed)
        phi, phibar, pi = data.reference_state, data.phibar, data.pi
        rng = rng_for(seed + 41)
        rho4 = state_power(phi, 0.25)
        rhobar4 = state_power(phibar, 0.25)
        worst = 0.0
        for _ in range(per):
            x = random_element(data.source, rng)
            x = x * (1.0 / max(x.frobenius(), 1e-12))
            lhs_vec = LpVector.from_element(rhobar4 @ pi(x) @ rhobar4, 2.0)
            rhs_vec = LpVector.from_element(rho4 @ x @ rho4, 2.0)
            worst = max(worst, abs(lp_norm(lhs_vec) - lp_norm(rhs_vec)))
        ok = worst < tol["defect"]
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "digest": _digest({"suite": "lemma41", "seed": seed}),
                "samples": per,
                "max_defect": worst,
                "pass": ok,
            }
        )
    return cases, passed


def _suite_expectation_detect(config: SuiteConfig):
    tol = config.tolerances
    cases = []
    passed = True
    search = int(tol.get("search", 500))
    for i in range(config.sample_count):
        seed = _case_seed(config.seed, i)
        # noninvariant inclusion: a positive invariance defect and a strict
        # norm-drop witness must both be found
        A, phibar = random_noninvariant_inclusion(seed)
        check = takesaki_invariant(A, phibar)
        rng = rng_for(seed + 99)
        small = A.decomposition.algebra
        best_gap = 0.0
        for _ in range(search):
            x = random_element(small, rng)
            best_gap = max(best_gap, interpolation_gap(A, phibar, x, 4.0))
            if best_gap > 3 * tol["gap_min"]:
                break
        non_ok = (not check.invariant) and check.defect > tol["defect_min"] and best_gap > tol["gap_min"]

        # invariant inclusion: the expectation exists and satisfies its
        # structural identities tightly
        Ainv, phin = random_invariant_inclusion(seed)
        E = construct_expectation(Ainv, phin)
        M = E.map.matrix
        inv_defect = float(np.max(np.abs(M @ M - M)))
        for a in Ainv.basis:
            inv_defect = max(inv_defect, (E(a) - a).frobenius())
        units = matrix_units(Ainv.parent)
        for u in units:
            inv_defect = max(inv_defect, abs(phin(E(u)) - phin(u)))
        rng2 = rng_for(seed + 123)
        for _ in range(5):
            g = random_element(Ainv.parent, rng2)
            pos = E(g @ g.adjoint())
            low = min(float(np.linalg.eigvalsh((b + b.conj().T) / 2).min()) for b in pos.data)
            inv_defect = max(inv_defect, max(0.0, -low))
        unit_a = Ainv.unit
        one = AlgebraElement.identity(Ainv.parent)
        inv_defect = max(inv_defect, (E(one) - unit_a).frobenius())
        inv_ok = inv_defect < tol["invariants"]

        ok = non_ok and inv_ok
        passed = passed and ok
        cases.append(
            {
                "case": i,
                "digest": _digest({"suite": "detect", "seed": seed}),
                "noninvariant_defect": check.defect,
                "witness_gap": best_gap,
                "invariant_expectation_defect": inv_defect,
                "pass": ok,
            }
        )
    return cases, passed


_P_NE_2_SUITES = {"clarkson", "yeadon_roundtrip", "dichotomy", "classify_roundtrip"}

SUITE_DEFAULTS: dict[str, dict] = {
    "clarkson": {
        "sizes": [[2], [3], [4], [1, 2]],
        "exponents": [1, 1.5, 3, 4],
        "sample_count": 500,
        "tolerances": {"orthogonal_defect": 1e-8, "overlap_defect": 1e-6, "witness_min": 0.1},
    },
    "yeadon_roundtrip": {
        "exponents": [1, 1.5, 3, 4],
        "sample_count": 16,
        "tolerances": {"roundtrip": 1e-7, "orthogonality": 1e-9},
    },
    "dichotomy": {
        "exponents": [1, 1.5, 3, 4],
        "sample_count": 8,
        "tolerances": {"isometry": 1e-8, "two_isometry": 1e-6, "witness_slack": 1e-6},
    },
    "classify_roundtrip": {
        "exponents": [1, 1.5, 3, 4, 7],
        "sample_count": 12,
        "tolerances": {"distance": 1e-7},
    },
    "state_restriction": {
        "exponents": [1.5, 3, 4],
        "sample_count": 10,
        "tolerances": {"defect": 1e-9, "perturbed_min": 1e-3},
    },
    "interpolation": {
        "exponents": [2, 3, 4, 8],
        "sample_count": 500,
        "tolerances": {"violation": 1e-10},
    },
    "duality": {
        "exponents": [1.5, 3],
        "sample_count": 8,
        "tolerances": {"identity": 1e-8},
    },
    "extrapolation": {
        "exponents": [2.5, 4, 7],
        "sample_count": 8,
        "tolerances": {"defect": 1e-8},
    },
    "lemma41": {
        "sample_count": 200,
        "tolerances": {"defect": 1e-8},
    },
    "expectation_detect": {
        "sample_count": 20,
        "tolerances": {"defect_min": 1e-6, "gap_min": 1e-3, "invariants": 1e-9, "search": 500},
    },
}

SUITE_PROPERTIES: dict[str, str] = {
    "clarkson": "equality in the p-th power parallelogram law is equivalent to "
    "two-sided orthogonality h k* = h* k = 0 (p != 2)",
    "yeadon_roundtrip": "the triple (J, w, B) of a tracial-source isometry is unique, "
    "inverts assembly, and its polar parts add over orthogonal projections",
    "dichotomy": "a tracial-source isometry preserves amplified norms exactly when "
    "its Jordan part is multiplicative",
    "classify_roundtrip": "classification of an assembled canonical map accepts and "
    "recovers (pi, E, w) under the normalization w* w = pi(1) = support of E",
    "state_restriction": "the state carried by the image of the reference vector "
    "restricts through the embedding to the source state",
    "interpolation": "for a unital inclusion with matched states and p >= 2, passing "
    "to the larger algebra does not increase the L_p norm",
    "duality": "the companion map at the conjugate exponent inverts the map under "
    "the star adjoint of trace duality",
    "extrapolation": "a companion family isometric at one exponent above two is "
    "isometric at every other exponent",
    "lemma41": "the two-sided exponent-four L_2 quantity agrees between source and "
    "embedded image",
    "expectation_detect": "a state-preserving expectation onto a unital subalgebra "
    "exists exactly when the subalgebra is stable under the modular flow; otherwise "
    "a strict norm drop is exhibited",
}

SUITES = {
    "clarkson": _suite_clarkson,
    "yeadon_roundtrip": _suite_yeadon_roundtrip,
    "dichotomy": _suite_dichotomy,
    "classify_roundtrip": _suite_classify_roundtrip,
    "state_restriction": _suite_state_restriction,
    "interpolation": _suite_interpolation,
    "duality": _suite_duality,
    "extrapolation": _suite_extrapolation,
    "lemma41": _suite_lemma41,
    "expectation_detect": _suite_expectation_detect,
}
