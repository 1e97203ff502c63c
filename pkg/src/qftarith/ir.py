"""Circuit intermediate representation.

Qubit ``0`` is the most significant position of the whole program: the first
qubit of the first declared register. Registers are stored MSB first, so
``reg[0]`` is always the sign qubit of a signed value.

A :class:`Program` is an immutable sequence of items. An item is a
:class:`Gate`, a :class:`Measure`, or a :class:`RepeatUntil` block that
re-runs its body under classical control of one measured flag qubit.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, NamedTuple, Sequence, Union

from .errors import RangeError


class GateKind(enum.Enum):
    H = "H"
    X = "X"
    PHASE = "PHASE"


class Control(NamedTuple):
    qubit: int
    positive: bool = True


@dataclass(frozen=True)
class Gate:
    """One primitive gate with any number of mixed-polarity controls.

    ``PHASE`` applies ``diag(1, exp(+-2*pi*i / 2**k))`` to the target;
    ``inverse`` selects the negative angle.
    """

    kind: GateKind
    target: int
    controls: tuple[Control, ...] = ()
    k: int = 0
    inverse: bool = False

    def __post_init__(self):
        ctrl_qubits = [c.qubit for c in self.controls]
        if self.target < 0 or any(q < 0 for q in ctrl_qubits):
            raise IndexError("qubit indices must be non-negative")
        if self.target in ctrl_qubits:
            raise ValueError(f"target {self.target} is also a control")
        if len(set(ctrl_qubits)) != len(ctrl_qubits):
            raise ValueError("control qubits must be distinct")
        if self.kind is GateKind.PHASE:
            if self.k < 1:
                raise ValueError("PHASE needs k >= 1")
        elif self.k or self.inverse:
            raise ValueError(f"{self.kind.value} takes no k/inverse")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target, *(c.qubit for c in self.controls))

    @property
    def n_negative(self) -> int:
        return sum(1 for c in self.controls if not c.positive)

    def __str__(self) -> str:
        name = self.kind.value
        if self.kind is GateKind.PHASE:
            name = f"R{self.k}" + ("^-1" if self.inverse else "")
        ctrl = ",".join(("" if c.positive else "~") + str(c.qubit) for c in self.controls)
        return f"{name}[{ctrl}->{self.target}]" if ctrl else f"{name}[{self.target}]"


@dataclass(frozen=True)
class Measure:
    qubit: int
    slot: str


@dataclass(frozen=True)
class RepeatUntil:
    """``while measure(flag) != expect: run body``.

    The flag is measured before every pass, so a flag that already holds
    ``expect`` runs the body zero times. Reaching ``max_iters`` passes with
    the flag still unset is an error.
    """

    body: tuple["Item", ...]
    flag: int
    expect: int = 1
    max_iters: int = 1
    label: str = "loop"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.expect not in (0, 1):
            raise ValueError("expect must be a bit")
        object.__setattr__(self, "body", tuple(self.body))


Item = Union[Gate, Measure, RepeatUntil]


def _item_qubits(item: Item) -> Iterator[int]:
    if isinstance(item, Gate):
        yield from item.qubits
    elif isinstance(item, Measure):
        yield item.qubit
    else:
        yield item.flag
        for sub in item.body:
            yield from _item_qubits(sub)


@dataclass(frozen=True)
class Program:
    total_qubits: int
    items: tuple[Item, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.total_qubits < 0:
            raise ValueError("total_qubits must be non-negative")
        for item in self.items:
            for q in _item_qubits(item):
                if q >= self.total_qubits:
                    raise IndexError(f"qubit {q} out of range for {self.total_qubits} qubits")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Item]:
        return iter(self.items)

    @property
    def is_pure(self) -> bool:
        """True when every item is a gate (no measurement or loop)."""
        return all(isinstance(it, Gate) for it in self.items)

    def gates(self) -> Iterator[Gate]:
        """Gates in static order; loop bodies are visited once."""
        for item in self.items:
            if isinstance(item, Gate):
                yield item
            elif isinstance(item, RepeatUntil):
                yield from Program(self.total_qubits, item.body).gates()

    def inverse(self) -> "Program":
        if not self.is_pure:
            raise ValueError("only gate-only programs can be inverted")
        inv = []
        for g in reversed(self.items):
            if g.kind is GateKind.PHASE:
                g = Gate(g.kind, g.target, g.controls, g.k, not g.inverse)
            inv.append(g)
        return Program(self.total_qubits, inv)

    def widened(self, total_qubits: int) -> "Program":
        return Program(total_qubits, self.items)


@dataclass(frozen=True)
class Register:
    """Ordered qubits of one integer, MSB (sign) first."""

    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if not self.qubits:
            raise ValueError("register width must be >= 1")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"register {self.name!r} repeats a qubit")

    @property
    def width(self) -> int:
        return len(self.qubits)

    def __len__(self) -> int:
        return len(self.qubits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.qubits)

    def __getitem__(self, i):
        return self.qubits[i]

    def sub(self, name: str, start: int, stop: int | None = None) -> "Register":
        return Register(name, self.qubits[start:stop])


# -- gate shorthands used by the builders ---------------------------------

def _ctrls(controls: Iterable) -> tuple[Control, ...]:
    out = []
    for c in controls:
        out.append(c if isinstance(c, Control) else Control(int(c)))
    return tuple(out)


def h(target: int) -> Gate:
    return Gate(GateKind.H, target)


def x(target: int, *controls) -> Gate:
    return Gate(GateKind.X, target, _ctrls(controls))


def phase(target: int, k: int, *controls, inverse: bool = False) -> Gate:
    return Gate(GateKind.PHASE, target, _ctrls(controls), k, inverse)


def neg(qubit: int) -> Control:
    return Control(qubit, False)


# -- signed encoding ------------------------------------------------------

def signed_range(width: int) -> range:
    return range(-(1 << (width - 1)), 1 << (width - 1))


def encode_signed(value: int, width: int) -> str:
    """Two's-complement bit pattern of ``value``, MSB first."""
    if width < 1:
        raise RangeError("width must be >= 1")
    if value not in signed_range(width):
        raise RangeError(f"{value} does not fit {width} signed bits")
    return format(value & ((1 << width) - 1), f"0{width}b")


def decode_signed(bits: str) -> int:
    if not bits:
        raise ValueError("empty bitstring")
    u = int(bits, 2)
    return u - (1 << len(bits)) if bits[0] == "1" else u


def compose(programs: Sequence[Program], total_qubits: int | None = None) -> Program:
    """Concatenate fragments that already share one global qubit numbering."""
    if total_qubits is None:
        total_qubits = max((p.total_qubits for p in programs), default=0)
    items: list[Item] = []
    for p in programs:
        items.extend(p.items)
    return Program(total_qubits, items)


# -- JSON wire format ------------------------------------------------------

def _item_to_dict(item: Item) -> dict[str, Any]:
    if isinstance(item, Gate):
        return {
            "gate": item.kind.value,
            "k": item.k,
            "inverse": item.inverse,
            "target": item.target,
            "controls": [{"q": c.qubit, "polarity": "pos" if c.positive else "neg"}
                         for c in item.controls],
        }
    if isinstance(item, Measure):
        return {"measure": {"qubit": item.qubit, "slot": item.slot}}
    return {"repeat_until": {
        "flag": item.flag,
        "expect": item.expect,
        "max_iters": item.max_iters,
        "label": item.label,
        "body": [_item_to_dict(s) for s in item.body],
    }}


def _item_from_dict(d: dict[str, Any]) -> Item:
    if "gate" in d:
        controls = tuple(Control(c["q"], c["polarity"] == "pos") for c in d.get("controls", []))
        return Gate(GateKind(d["gate"]), d["target"], controls, d.get("k", 0), d.get("inverse", False))
    if "measure" in d:
        m = d["measure"]
        return Measure(m["qubit"], m["slot"])
    r = d["repeat_until"]
    return RepeatUntil(
        tuple(_item_from_dict(s) for s in r["body"]),
        flag=r["flag"],
        expect=r.get("expect", 1),
        max_iters=r["max_iters"],
        label=r.get("label", "loop"),
    )


def program_to_dict(program: Program) -> dict[str, Any]:
    return {"total_qubits": program.total_qubits,
            "items": [_item_to_dict(it) for it in program.items]}


def program_from_dict(d: dict[str, Any]) -> Program:
    return Program(d["total_qubits"], tuple(_item_from_dict(it) for it in d["items"]))


def dumps(program: Program, **extra) -> str:
    return json.dumps({**program_to_dict(program), **extra})


def loads(text: str) -> Program:
    return program_from_dict(json.loads(text))
