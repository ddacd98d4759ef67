"""Benchmark programs: sign, minimum on naturals, on non-positives, and on
all integers, with direct oracles for differential testing."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .interp import Program, Success
from .parser import parse_forest, pretty_forest
from .syntax import Term, invert, seq, validate


@dataclass(frozen=True)
class ProgramBundle:
    name: str
    term: Term
    inputs: tuple[tuple[str, str], ...]
    outputs: tuple[tuple[str, str], ...]
    ancillas: tuple[str, ...]

    def __post_init__(self):
        if validate(self.term):
            raise ValueError(f"{self.name}: ill-formed term")
        if {v for v, _ in self.inputs} & set(self.ancillas):
            raise ValueError(f"{self.name}: inputs and ancillas overlap")

    def initial(self, **inputs: int) -> dict[str, int]:
        state = {a: 0 for a in self.ancillas}
        state.update(inputs)
        return state


def _distinct(*names: str) -> None:
    if len(set(names)) != len(names):
        raise ValueError(f"variables must be distinct: {names}")


def oracle_sign(n: int) -> int:
    return (n > 0) - (n < 0)


def oracle_min(m: int, n: int) -> int:
    return m if m <= n else n


def _sign_text(x: str, i: str, s: str) -> str:
    return f"from ({i} = 0 or 0) to ({i} = {x} or !({s} = 0)) {{{s} += 1}}"


def _min_pos_text(x: str, y: str, i: str, mn: str, found: str) -> str:
    return (
        f"{mn} += {x};\n"
        f"from (({i}=0) or 0) to (({i}={x}) or ({found}=1)) {{\n"
        f"    if ({i}={y}) {{ {mn} -= {x}; {mn} += {y}; {found} += 1 }} else {{skip}}\n"
        f"}}"
    )


def _min_neg_text(x: str, y: str, i: str, mn: str, found: str) -> str:
    # reaching -y first means |y| < |x|, so x < y
    return (
        f"{mn} += {y};\n"
        f"from (({i}=0) or 0) to (({i}=-{x}) or ({found}=1)) {{\n"
        f"    if ({i}=-{y}) {{ {mn} -= {y}; {mn} += {x}; {found} += 1 }} else {{skip}}\n"
        f"}}"
    )


def sign_program(x: str = "x", i: str = "i", s: str = "s") -> ProgramBundle:
    """Leaves sign(x) in both ``i`` and ``s``; at most one loop unfolding."""
    _distinct(x, i, s)
    return ProgramBundle(
        "sign",
        parse_forest(_sign_text(x, i, s)),
        ((x, "operand"),),
        ((i, "sign of operand"), (s, "sign of operand")),
        (i, s),
    )


def min_pos_program(x="x", y="y", i="i", mn="min", found="found") -> ProgramBundle:
    """Minimum of two naturals in min(x, y) (+1) unfoldings."""
    _distinct(x, y, i, mn, found)
    return ProgramBundle(
        "min_pos",
        parse_forest(_min_pos_text(x, y, i, mn, found)),
        ((x, "m >= 0"), (y, "n >= 0")),
        ((mn, "min(m, n)"),),
        (i, mn, found),
    )


def min_neg_program(x="x", y="y", i="i", mn="min", found="found") -> ProgramBundle:
    """Minimum of two non-positive integers."""
    _distinct(x, y, i, mn, found)
    return ProgramBundle(
        "min_neg",
        parse_forest(_min_neg_text(x, y, i, mn, found)),
        ((x, "m <= 0"), (y, "n <= 0")),
        ((mn, "min(m, n)"),),
        (i, mn, found),
    )


MIN_GEN_ANCILLAS = ("i1", "s1", "i2", "s2", "i3", "min", "found")


def _min_gen_term(x: str, y: str, anc: tuple[str, ...]) -> Term:
    i1, s1, i2, s2, i3, mn, found = anc
    # sign combinations -> case:
    #   x >= 0, y >= 0            -> naturals  (zeros land here first)
    #   x <= 0, y <= 0            -> non-positives
    #   s1 = -1, s2 = 1           -> min is x
    #   s1 = 1, s2 = -1           -> min is y
    text = (
        f"{_sign_text(x, i1, s1)};\n"
        f"{_sign_text(y, i2, s2)};\n"
        f"if (!({s1} = -1) and !({s2} = -1)) {{\n{_min_pos_text(x, y, i3, mn, found)}\n}} else {{\n"
        f"  if (!({s1} = 1) and !({s2} = 1)) {{\n{_min_neg_text(x, y, i3, mn, found)}\n}} else {{\n"
        f"    if ({s1} = -1) {{ {mn} += {x} }} else {{ {mn} += {y} }}\n"
        f"  }}\n"
        f"}}"
    )
    return parse_forest(text)


def min_gen_program(x: str = "x", y: str = "y", ancillas=MIN_GEN_ANCILLAS) -> ProgramBundle:
    """Minimum of any two integers in O(min(|x|, |y|)) loop unfoldings.

    Ancillas (two sign pairs, the loop counter, ``found``) are left dirty.
    """
    anc = tuple(ancillas)
    if len(anc) != 7:
        raise ValueError("min_gen needs 7 ancillas: i1, s1, i2, s2, i3, min, found")
    _distinct(x, y, *anc)
    return ProgramBundle(
        "min_gen",
        _min_gen_term(x, y, anc),
        ((x, "m"), (y, "n")),
        ((anc[5], "min(m, n)"),),
        anc,
    )


def min_gen_clean(x: str = "x", y: str = "y", ancillas=MIN_GEN_ANCILLAS) -> ProgramBundle:
    """``min_gen`` followed by the inverted sign computations.

    The case split never writes the sign variables, so undoing both sign
    loops afterwards returns i1, s1, i2, s2 to 0.
    """
    anc = tuple(ancillas)
    base = min_gen_program(x, y, anc)
    i1, s1, i2, s2 = anc[:4]
    undo = seq(
        invert(parse_forest(_sign_text(y, i2, s2))),
        invert(parse_forest(_sign_text(x, i1, s1))),
    )
    return ProgramBundle("min_gen_clean", seq(base.term, undo), base.inputs, base.outputs, anc)


BUNDLES = {
    "sign": sign_program,
    "min_pos": min_pos_program,
    "min_neg": min_neg_program,
    "min_gen": min_gen_program,
    "min_gen_clean": min_gen_clean,
}


def get_bundle(name: str) -> ProgramBundle:
    try:
        return BUNDLES[name]()
    except KeyError:
        raise KeyError(f"unknown program {name!r}; choose from {', '.join(BUNDLES)}") from None


EXAMPLES_DIR = Path(__file__).with_name("examples")


def example_text(name: str) -> str:
    """Shipped ``.fst`` text for a bundle: the pretty-printer output plus newline."""
    return pretty_forest(get_bundle(name).term) + "\n"


def write_examples(directory: str | Path) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in BUNDLES:
        p = out / f"{name}.fst"
        p.write_text(example_text(name), encoding="utf-8")
        written.append(p)
    return written


def _in_domain(name: str, m: int, n: int) -> bool:
    if name == "min_pos":
        return m >= 0 and n >= 0
    if name == "min_neg":
        return m <= 0 and n <= 0
    return True


def bench(name: str, lo: int, hi: int) -> list[dict]:
    """Step counts of a bundle over the input grid ``[lo, hi]`` (squared for
    two-input programs; min_pos/min_neg keep only their sign quadrant)."""
    bundle = get_bundle(name)
    prog = Program(bundle.term)
    out_var = bundle.outputs[0][0]
    rows = []
    if name == "sign":
        for x in range(lo, hi + 1):
            outcome, stats = prog.run(bundle.initial(**{bundle.inputs[0][0]: x}))
            result = outcome.state[out_var] if isinstance(outcome, Success) else None
            rows.append({"x": x, "result": result, "oracle": oracle_sign(x),
                         "loopUnfoldings": stats.loop_unfoldings, "total": stats.total})
        return rows
    xv, yv = bundle.inputs[0][0], bundle.inputs[1][0]
    for m in range(lo, hi + 1):
        for n in range(lo, hi + 1):
            if not _in_domain(name, m, n):
                continue
            outcome, stats = prog.run(bundle.initial(**{xv: m, yv: n}))
            result = outcome.state[out_var] if isinstance(outcome, Success) else None
            rows.append({"m": m, "n": n, "result": result, "oracle": oracle_min(m, n),
                         "loopUnfoldings": stats.loop_unfoldings, "total": stats.total})
    return rows
