"""Certificate bundles: self-contained JSON records that re-verify offline.

A bundle embeds the inputs (sets or distributions), the subspace, the claimed
quantities with both sides of every inequality, the tolerances, and the seed;
verify_bundle recomputes everything from the embedded inputs and the stored
subspace, accepting only within the stored tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import Dist, pushforward_quotient, xor_convolve
from .endgame import EndgameTranscript
from .entropy import fibring_decompose, shannon_entropy
from .errors import ValidationError
from .families import PRNG_ID, doubling_stats
from .gf2 import Subspace, coset_decompose
from .oracle import CRITERION_B, CRITERION_PFR, CRITERION_T11, SubspaceCertificate
from .pipeline import (
    CRITERION_MANY,
    CRITERION_RICH,
    SolveResult,
    StatementParams,
    check_statement_B,
)
from .tolerances import IDENTITY_TOL, tolerances_dict


def _plain(obj):
    """Recursively convert numpy scalars/arrays for json.dumps."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def solve_bundle(result: SolveResult, p: Dist, q: Dist) -> dict:
    """Bundle a solve_B / rich_cosets result with its embedded inputs."""
    return _plain(
        {
            "kind": result.certificate.criterion,
            "prng": PRNG_ID,
            "seed": result.seed,
            "mode": result.mode,
            "inputs": {"p": p.to_json(), "q": q.to_json()},
            "input_digests": {"p": p.digest(), "q": q.digest()},
            "certificate": result.certificate.to_json(),
            "steps": [s.to_json() for s in result.steps],
            "check": result.check.to_json(),
            "tolerances": tolerances_dict(),
        }
    )


def many_sums_bundle(result: SolveResult, dists: list[Dist]) -> dict:
    return _plain(
        {
            "kind": CRITERION_MANY,
            "prng": PRNG_ID,
            "seed": result.seed,
            "mode": result.mode,
            "inputs": {"dists": [d.to_json() for d in dists]},
            "certificate": result.certificate.to_json(),
            "steps": [s.to_json() for s in result.steps],
            "tolerances": tolerances_dict(),
        }
    )


def set_bundle(result: SolveResult, elements: list[int], n: int) -> dict:
    return _plain(
        {
            "kind": CRITERION_T11,
            "prng": PRNG_ID,
            "seed": result.seed,
            "mode": result.mode,
            "inputs": {"set": {"n": n, "elements": [format(x, "x") for x in sorted(elements)]}},
            "certificate": result.certificate.to_json(),
            "steps": [s.to_json() for s in result.steps],
            "tolerances": tolerances_dict(),
        }
    )


def endgame_bundle(transcript: EndgameTranscript, p: Dist, q: Dist) -> dict:
    return _plain(
        {
            "kind": "ENDGAME",
            "prng": PRNG_ID,
            "inputs": {"p": p.to_json(), "q": q.to_json()},
            "transcript": transcript.to_json(),
            "tolerances": tolerances_dict(),
        }
    )


def pfr_bundle(cert: SubspaceCertificate, p: Dist, q: Dist) -> dict:
    return _plain(
        {
            "kind": CRITERION_PFR,
            "prng": PRNG_ID,
            "inputs": {"p": p.to_json(), "q": q.to_json()},
            "certificate": cert.to_json(),
            "tolerances": tolerances_dict(),
        }
    )


@dataclass
class VerifyReport:
    kind: str
    ok: bool
    failures: list = field(default_factory=list)
    recomputed: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "ok": self.ok,
            "failures": self.failures,
            "recomputed": _plain(self.recomputed),
        }


def _close(report: VerifyReport, name: str, got: float, stored: float, tol: float) -> None:
    report.recomputed[name] = got
    if abs(got - stored) > tol:
        report.ok = False
        report.failures.append(f"{name}: recomputed {got!r} != stored {stored!r}")


def _require(report: VerifyReport, name: str, condition: bool) -> None:
    if not condition:
        report.ok = False
        report.failures.append(name)


def verify_bundle(payload: dict) -> VerifyReport:
    """Recompute every inequality in a certificate bundle from its inputs."""
    kind = payload.get("kind")
    report = VerifyReport(kind=str(kind), ok=True)
    tol = float(payload.get("tolerances", {}).get("identity", IDENTITY_TOL))
    try:
        if kind in (CRITERION_B, CRITERION_RICH):
            p = Dist.from_json(payload["inputs"]["p"])
            q = Dist.from_json(payload["inputs"]["q"])
            cert = payload["certificate"]
            v = Subspace.from_json(cert["subspace"])
            ach = cert["achieved"]
            if kind == CRITERION_B:
                params = StatementParams(
                    eta=float(cert["parameters"]["eta"]),
                    epsilon=float(cert["parameters"]["epsilon"]),
                    L=float(cert["parameters"]["L_achieved"]) + tol,
                )
                chk = check_statement_B(p, q, v, params)
                _close(report, "lhs", chk.lhs, float(ach["lhs"]), tol)
                _close(report, "rhs", chk.rhs, float(ach["rhs"]), tol)
                _require(report, "statement B inequality", chk.passes)
            else:
                h_total = shannon_entropy(p) + shannon_entropy(q)
                s = h_total - shannon_entropy(xor_convolve(p, q))
                rep = fibring_decompose(p, q, v)
                hx = shannon_entropy(p) - shannon_entropy(pushforward_quotient(p, v))
                hy = shannon_entropy(q) - shannon_entropy(pushforward_quotient(q, v))
                eps = float(cert["parameters"]["epsilon"])
                _close(report, "s", s, float(ach["s"]), tol)
                _close(report, "s_quotient", rep.s_quotient, float(ach["s_quotient"]), tol)
                _close(report, "h_x_given_proj", hx, float(ach["h_x_given_proj"]), tol)
                _close(report, "h_y_given_proj", hy, float(ach["h_y_given_proj"]), tol)
                bound = s - eps * h_total
                _require(report, "quotient interaction", rep.s_quotient <= eps * h_total + tol)
                _require(report, "x coset bound", hx >= bound - tol)
                _require(report, "y coset bound", hy >= bound - tol)
        elif kind == CRITERION_MANY:
            dists = [Dist.from_json(d) for d in payload["inputs"]["dists"]]
            cert = payload["certificate"]
            v = Subspace.from_json(cert["subspace"])
            eps = float(cert["parameters"]["epsilon"])
            pushed = [pushforward_quotient(d, v) for d in dists]
            total = pushed[0]
            for extra in pushed[1:]:
                total = xor_convolve(total, extra)
            lhs = shannon_entropy(total)
            rhs = sum(shannon_entropy(d) for d in pushed) - eps * sum(
                shannon_entropy(d) for d in dists
            )
            _close(report, "lhs", lhs, float(cert["achieved"]["lhs"]), tol)
            _require(report, "k-fold inequality", lhs >= rhs - tol)
        elif kind == CRITERION_T11:
            from .dist import uniform_on

            spec = payload["inputs"]["set"]
            n = int(spec["n"])
            members = sorted(int(h, 16) for h in spec["elements"])
            cert = payload["certificate"]
            v = Subspace.from_json(cert["subspace"])
            ach = cert["achieved"]
            eps = float(cert["parameters"]["epsilon"])
            stats = doubling_stats(members)
            _close(report, "eta", stats.eta, float(ach["eta"]), tol)
            u_a = uniform_on(members, n)
            parts = coset_decompose(members, v)
            expected_log = sum(
                len(part) * math.log2(len(part)) for part in parts.values()
            ) / len(members)
            h_cond = shannon_entropy(u_a) - shannon_entropy(pushforward_quotient(u_a, v))
            _close(report, "expected_log", expected_log, float(ach["expected_log_intersection"]), tol)
            _require(report, "coset identity", abs(expected_log - h_cond) <= tol)
            if len(members) > 1:
                bound = (stats.eta - eps) * math.log2(len(members))
                _require(report, "intersection bound", expected_log >= bound - tol)
        elif kind == "ENDGAME":
            from .endgame import endgame

            p = Dist.from_json(payload["inputs"]["p"])
            q = Dist.from_json(payload["inputs"]["q"])
            t = payload["transcript"]
            fresh = endgame(
                p, q, float(t["eta"]), float(t["kappa"]),
                fiber_cap=int(t["fiber_cap"].get("cap", 256)) if t["fiber_cap"].get("applied") else 256,
            )
            _close(report, "i_z1_z3", fresh.i_z1_z3, float(t["i_z1_z3"]), tol)
            _close(report, "i_z1_z2", fresh.i_z1_z2, float(t["i_z1_z2"]), tol)
            _close(report, "expectation", fresh.expectation, float(t["expectation"]), tol)
            _require(report, "mi bound", fresh.mi_bound_holds)
            _require(report, "z entropy gaps", fresh.z_entropy_gap_holds)
            _require(report, "480k expectation", fresh.expectation_holds)
        elif kind == CRITERION_PFR:
            from .oracle import reverify_pfr, SubspaceCertificate as Cert

            p = Dist.from_json(payload["inputs"]["p"])
            q = Dist.from_json(payload["inputs"]["q"])
            cert_payload = payload["certificate"]
            cert = Cert(
                criterion=cert_payload["criterion"],
                search_mode=cert_payload["search_mode"],
                subspace=Subspace.from_json(cert_payload["subspace"]),
                parameters=cert_payload["parameters"],
                achieved=cert_payload["achieved"],
            )
            _require(report, "pfr bounds", reverify_pfr(cert, p, q))
        else:
            raise ValidationError(f"unknown bundle kind {kind!r}")
    except (KeyError, TypeError, ValueError, RuntimeError) as exc:
        report.ok = False
        report.failures.append(f"bundle rejected: {exc}")
    return report
