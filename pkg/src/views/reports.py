"""
Rendering of command results as JSON or text.

JSON is emitted with sorted keys so identical inputs give identical bytes.
"""

import json
from typing import Any, Callable, Dict, List


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def _dims(dims: List[int], start: int) -> str:
    return "  ".join(f"m={start + k}: {dim}" for k, dim in enumerate(dims))


def _classify(p: Dict[str, Any]) -> List[str]:
    out = [
        f"type:               {p['type']}",
        f"configuration:      {p['configuration']}",
        f"family:             {p['family'] or '-'}",
        f"adjoints ad_m:      {_dims(p['adjoint_dims'], 1)}",
        f"vanishing adjoints: {'yes' if p['vanishing_adjoints'] else 'no'} ({p['vanishing_evidence']})",
        f"kodaira:            {p['kodaira']}",
        f"contractible:       {p['contractible']}",
    ]
    if p.get("certificate"):
        cert = p["certificate"]
        out.append(f"certificate:        {cert['recipe']}, {len(cert['steps'])} maps, {len(cert['terminal'])} terminal points")
        out += [f"  {k}. {step['label']} -> {step['expected_type']}" for k, step in enumerate(cert["steps"], start=1)]
    if p.get("witness"):
        w = p["witness"]
        out.append(f"witness:            ad_({w['n']},{w['m']}) member of degree {w['degree']}: {w['description']}")
    if p.get("structure"):
        s = p["structure"]
        held = [name for name, ok in s["cases"].items() if ok]
        out.append(f"structure (m=d+{s['m_minus_d']}): {', '.join(held) if held else 'fails: ' + ', '.join(s['failed'])}")
    if p.get("search"):
        s = p["search"]
        out.append(f"search:             {s['status']} ({s['expanded']} states, depth {s['depth_reached']})")
    diag = p.get("diagnostics") or {}
    if diag:
        out.append(
            f"numerics:           jung minimal {diag['jung_minimal']}, quadratic image degree "
            f"{diag['quadratic_image_degree']}"
            + (f", index {diag['marletta_index']}" if "marletta_index" in diag else "")
        )
    out += [f"  [{key}] {text}" for key, text in sorted(p["citations"].items())]
    return out


def _adjoints(p: Dict[str, Any]) -> List[str]:
    out = [f"type: {p['type']}", f"n = {p['n']}"]
    out += [f"  ad_({p['n']},{row['m']}) {row['system']}: dim {row['dim']}" for row in p["systems"]]
    out.append(f"first empty m: {p['first_empty_m']}, stabilized: {p['stabilized']}")
    return out


def _plurigenera(p: Dict[str, Any]) -> List[str]:
    out = [f"P_{v['m']} = {v['value']}" for v in p["values"]]
    out.append(f"verdict: {p['verdict']}")
    if p.get("agrees_with_theorem") is not None:
        out.append(f"type table: {'agrees' if p['agrees_with_theorem'] else 'DISAGREES'}")
    return out


def _transform(p: Dict[str, Any]) -> List[str]:
    image = p["image"]
    out = [f"map: {p['label']} (degree {image['map']['degree']})"]
    out += [f"  L{s['index'] + 1} -> curve of degree {s['degree']}" for s in image["surviving"]]
    out += [f"  L{c['index'] + 1} -> point [{':'.join(c['point'])}]" for c in image["contracted"]]
    out.append(f"image: {p['image_type']}")
    out.append(f"degree formula: {'ok' if image['degree_formula_ok'] else 'MISMATCH'} ({image['image_degree']} vs {image['expected_degree']})")
    return out


def _contract(p: Dict[str, Any]) -> List[str]:
    out = [f"recipe: {p['recipe']}"]
    out += [f"  {k}. {step['label']} -> {step['expected_type']}" for k, step in enumerate(p["steps"], start=1)]
    out.append(f"terminal points: {len(p['terminal'])}")
    return out


def _verify(p: Dict[str, Any]) -> List[str]:
    if p["ok"]:
        return [f"PASS: {p['steps_checked']} steps replayed, {len(p['terminal'])} terminal points"]
    where = f"step {p['failed_step']}" if p["failed_step"] else "after the last step"
    return [f"FAIL at {where}: {p['reason']}"]


def _realize(p: Dict[str, Any]) -> List[str]:
    return [f"d = {p['d']}"] + [f"  L{k}: {' '.join(line)}" for k, line in enumerate(p["lines"], start=1)]


_TEXT: Dict[str, Callable[[Dict[str, Any]], List[str]]] = {
    "classify": _classify,
    "adjoints": _adjoints,
    "plurigenera": _plurigenera,
    "transform": _transform,
    "contract": _contract,
    "verify": _verify,
    "realize": _realize,
}


def render_text(command: str, payload: Dict[str, Any]) -> str:
    return "\n".join(_TEXT[command](payload))


def render(command: str, payload: Dict[str, Any], output_format: str) -> str:
    if output_format == "json":
        return render_json(payload)
    return render_text(command, payload)
