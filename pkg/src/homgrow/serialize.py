"""JSON document schema for chain complexes and report serialization.

The shared complex document is

    {"m": int, "top_degree": int, "dims": [int, ...],
     "differentials": [matrix, ...]}

with one matrix per differential c_n (n = 1..top), each matrix a list of
rows, each row a list of entries, and each entry a list of terms
{"exp": [e_1, ..., e_m], "coef": "<decimal integer string>"}.  Coefficients
travel as strings so arbitrary precision survives the round trip.  m = 0
encodes a plain integer chain complex (every exponent list empty).
"""

from __future__ import annotations

import json

from .chain_complex import IntChainComplex
from .errors import ParseError
from .exact_linalg import IntMatrix
from .group_ring import LaurentChainComplex, LaurentPoly

__all__ = [
    "complex_to_document",
    "complex_from_document",
    "load_complex",
    "dump_complex",
    "int_complex_from_laurent",
    "tower_report_rows",
    "tower_rows_to_csv",
]


def complex_to_document(C: LaurentChainComplex) -> dict:
    diffs = []
    for n in range(1, C.top_degree + 1):
        mat = C.differential(n)
        rows = []
        for row in mat:
            out_row = []
            for p in row:
                out_row.append([
                    {"exp": list(e), "coef": str(c)}
                    for e, c in sorted(p.terms.items())
                ])
            rows.append(out_row)
        diffs.append(rows)
    return {
        "m": C.m,
        "top_degree": C.top_degree,
        "dims": list(C.dims),
        "differentials": diffs,
    }


def complex_from_document(doc: dict) -> LaurentChainComplex:
    try:
        m = int(doc["m"])
        top = int(doc["top_degree"])
        dims = [int(d) for d in doc["dims"]]
        raw_diffs = doc["differentials"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or malformed field: {exc}") from exc
    if len(dims) != top + 1:
        raise ParseError(f"dims has {len(dims)} entries for top_degree {top}")
    if len(raw_diffs) != top:
        raise ParseError(
            f"expected {top} differentials, found {len(raw_diffs)}")
    diffs = []
    for n, mat in enumerate(raw_diffs, start=1):
        if len(mat) != dims[n - 1]:
            raise ParseError(
                f"differential {n}: {len(mat)} rows, expected {dims[n - 1]}")
        rows = []
        for i, row in enumerate(mat):
            if len(row) != dims[n]:
                raise ParseError(
                    f"differential {n}, row {i}: {len(row)} entries, "
                    f"expected {dims[n]}")
            out_row = []
            for j, entry in enumerate(row):
                terms = {}
                for t in entry:
                    try:
                        exp = tuple(int(x) for x in t["exp"])
                        coef = int(t["coef"])
                    except (KeyError, TypeError, ValueError) as exc:
                        raise ParseError(
                            f"differential {n}, entry ({i},{j}): bad term "
                            f"{t!r}") from exc
                    if len(exp) != m:
                        raise ParseError(
                            f"differential {n}, entry ({i},{j}): exponent "
                            f"arity {len(exp)} != m = {m}")
                    terms[exp] = terms.get(exp, 0) + coef
                out_row.append(LaurentPoly(m, terms))
            rows.append(out_row)
        diffs.append(rows)
    from .errors import InvalidComplex
    try:
        return LaurentChainComplex(m, dims, diffs)
    except InvalidComplex as exc:
        raise ParseError(f"invalid complex: {exc}") from exc


def load_complex(path: str) -> LaurentChainComplex:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    return complex_from_document(doc)


def dump_complex(C: LaurentChainComplex, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(complex_to_document(C), fh, sort_keys=True, indent=1)
        fh.write("\n")


def int_complex_from_laurent(C: LaurentChainComplex) -> IntChainComplex:
    """Interpret an m = 0 document as a plain integer complex."""
    if C.m != 0:
        raise ParseError("complex has group-ring variables; quotient required")
    diffs = []
    for n in range(1, C.top_degree + 1):
        mat = C.differential(n)
        rows = [[p.terms.get((), 0) for p in row] for row in mat]
        diffs.append(IntMatrix.from_rows(rows) if rows
                     else IntMatrix.zeros(0, C.dims[n]))
    return IntChainComplex(C.dims, diffs)


# ---------------------------------------------------------------------------
# tower report tables
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def tower_report_rows(report) -> tuple:
    """(header, rows) of the flat per-level x per-degree table."""
    primes = list(report.primes)
    header = ["level_index", "index", "degree", "betti_q"]
    header += [f"betti_p_{p}" for p in primes]
    header += ["d_hn", "ln_tors", "ln_det_c", "ln_det_alpha", "rho_z", "rho_2"]
    header += ["betti_q_per_index"]
    header += [f"betti_p_{p}_per_index" for p in primes]
    header += ["d_hn_per_index", "ln_tors_per_index", "ln_det_c_per_index",
               "ln_det_alpha_per_index", "rho_z_per_index", "rho_2_per_index"]
    rows = []
    for li, lv in enumerate(report.levels):
        idx = lv.index
        for n in range(report.max_degree + 1):
            row = [str(li), str(idx), str(n), str(lv.betti_q[n])]
            row += [str(lv.betti_mod_p[p][n]) for p in primes]
            row += [str(lv.d_hn[n]), _fmt(lv.ln_tors[n]),
                    _fmt(lv.ln_det_c[n]), _fmt(lv.ln_det_alpha[n]),
                    _fmt(lv.rho_z), _fmt(lv.rho_2)]
            row += [_fmt(lv.betti_q[n] / idx)]
            row += [_fmt(lv.betti_mod_p[p][n] / idx) for p in primes]
            row += [_fmt(lv.d_hn[n] / idx), _fmt(lv.ln_tors[n] / idx),
                    _fmt(lv.ln_det_c[n] / idx), _fmt(lv.ln_det_alpha[n] / idx),
                    _fmt(lv.rho_z / idx), _fmt(lv.rho_2 / idx)]
            rows.append(row)
    return header, rows


def tower_rows_to_csv(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(r))
    return "\n".join(lines) + "\n"


def tower_report_json(report) -> str:
    header, rows = tower_report_rows(report)
    payload = {
        "columns": header,
        "rows": rows,
        "lambda": repr(report.lam),
        "tail_estimates": {k: [repr(float(x)) for x in v]
                           for k, v in report.tail_estimates.items()},
        "cauchy_flags": report.cauchy_flags,
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"
