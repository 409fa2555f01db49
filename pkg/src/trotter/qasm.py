"""OpenQASM 2.0 and JSON interchange for Trotter circuits"""

import json
import logging
import re
from typing import Any, Dict, List

from ..utils.errors import UsageError
from .circuit import Circuit, Gate, GateKind

logger = logging.getLogger(__name__)

QASM_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
METADATA_PREFIX = "// metadata: "

_ROTATION = re.compile(r"^(rz|rx|ry)\(([^)]+)\)\s+q\[(\d+)\];$")
_CX = re.compile(r"^cx\s+q\[(\d+)\],\s*q\[(\d+)\];$")
_QREG = re.compile(r"^qreg\s+q\[(\d+)\];$")
_X = re.compile(r"^x\s+q\[(\d+)\];$")


def format_angle(angle: float) -> str:
    return format(angle, ".17g")


def to_qasm(circuit: Circuit) -> str:
    """
    rz/rx/ry gates; RZZ(theta) on (a, b) becomes cx a,b; rz(theta) b; cx a,b.

    The metadata goes in a ``// metadata:`` comment and the initial basis state
    is prepared from |0...0> with x gates ahead of the circuit.
    """
    lines = [QASM_HEADER + f"qreg q[{circuit.size}];"]
    if circuit.metadata:
        lines.append(METADATA_PREFIX + json.dumps(circuit.metadata, sort_keys=True))
    for site, bit in enumerate(circuit.metadata.get("initial", "")):
        if bit == "1":
            lines.append(f"x q[{site}];")

    for gate in circuit.gates:
        angle = format_angle(gate.angle)
        if gate.kind is GateKind.RZZ:
            a, b = gate.sites
            lines.append(f"cx q[{a}],q[{b}];")
            lines.append(f"rz({angle}) q[{b}];")
            lines.append(f"cx q[{a}],q[{b}];")
        else:
            lines.append(f"{gate.kind.value.lower()}({angle}) q[{gate.sites[0]}];")
    return "\n".join(lines) + "\n"


def to_json(circuit: Circuit) -> str:
    payload = {
        "L": circuit.size,
        "metadata": circuit.metadata,
        "gates": [gate.to_dict() for gate in circuit.gates],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def export_circuit(circuit: Circuit, fmt: str = "qasm2") -> str:
    if fmt == "qasm2":
        return to_qasm(circuit)
    if fmt == "json":
        return to_json(circuit)
    raise UsageError(f"Unknown circuit format {fmt!r}")


def _statements(text: str) -> List[str]:
    statements = []
    for raw in text.splitlines():
        line = raw.split("//", 1)[0].strip()
        if line:
            statements.append(line)
    return statements


def _metadata(text: str) -> Dict[str, Any]:
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith(METADATA_PREFIX):
            try:
                data = json.loads(line[len(METADATA_PREFIX):])
            except json.JSONDecodeError as e:
                raise UsageError(f"Malformed QASM metadata comment: {e}")
            if not isinstance(data, dict):
                raise UsageError("QASM metadata comment must hold a JSON object")
            return data
    return {}


def parse_qasm(text: str) -> Circuit:
    """
    Inverse of ``to_qasm``; accepts only the gate patterns it emits. Leading x
    gates become the circuit's initial basis state.
    """
    statements = _statements(text)
    if len(statements) < 3 or statements[0] != "OPENQASM 2.0;":
        raise UsageError("Missing OPENQASM 2.0 header")
    if statements[1] != 'include "qelib1.inc";':
        raise UsageError("Missing qelib1.inc include")
    match = _QREG.match(statements[2])
    if not match:
        raise UsageError(f"Expected qreg declaration, got {statements[2]!r}")
    size = int(match.group(1))
    metadata = _metadata(text)

    body = statements[3:]
    initial = ["0"] * size
    prepared = False
    while body and _X.match(body[0]):
        site = int(_X.match(body[0]).group(1))
        if site >= size:
            raise UsageError(f"x gate on site {site} outside [0, {size})")
        initial[site] = "1"
        prepared = True
        body = body[1:]
    if prepared:
        metadata["initial"] = "".join(initial)
    circuit = Circuit(size, metadata=metadata)

    i = 0
    while i < len(body):
        line = body[i]
        rotation = _ROTATION.match(line)
        if rotation:
            kind = GateKind(rotation.group(1).upper())
            circuit.append(Gate(kind, (int(rotation.group(3)),), float(rotation.group(2))))
            i += 1
            continue
        cx = _CX.match(line)
        if cx and i + 2 < len(body):
            a, b = int(cx.group(1)), int(cx.group(2))
            middle = _ROTATION.match(body[i + 1])
            closing = _CX.match(body[i + 2])
            if (
                middle
                and middle.group(1) == "rz"
                and int(middle.group(3)) == b
                and closing
                and (int(closing.group(1)), int(closing.group(2))) == (a, b)
            ):
                circuit.append(Gate(GateKind.RZZ, (a, b), float(middle.group(2))))
                i += 3
                continue
        raise UsageError(f"Unsupported QASM statement {line!r}")
    return circuit


def parse_json(text: str) -> Circuit:
    try:
        data = json.loads(text)
        gates = [Gate(g["kind"], tuple(g["sites"]), float(g["angle"])) for g in data["gates"]]
        return Circuit(int(data["L"]), gates, dict(data.get("metadata", {})))
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise UsageError(f"Malformed circuit JSON: {e}")
