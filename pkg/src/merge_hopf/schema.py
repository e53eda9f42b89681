"""JSON Schemas for ``merge-hopf --json`` output.

Every run prints one object ``{"command": ..., "result": ...}``.  The schemas
are plain dicts (draft 2020-12); validate with any JSON Schema library.
"""

_TERM = {"type": "object", "required": ["coeff", "forest"],
         "properties": {"coeff": {"type": "integer"}, "forest": {"type": "string"}}}
_TENSOR_TERM = {"type": "object", "required": ["coeff", "left", "right", "eps", "eta"],
                "properties": {"coeff": {"type": "integer"}, "left": {"type": "string"},
                               "right": {"type": "string"},
                               "eps": {"type": ["integer", "null"]}, "eta": {"type": ["integer", "null"]}}}
_COUNTS = {"type": "object", "required": ["b0", "acc", "sigma", "sigma_hat"],
           "properties": {k: {"type": "integer"} for k in ("b0", "acc", "sigma", "sigma_hat")}}
_OCC = {"type": "object", "required": ["component", "path"],
        "properties": {"component": {"type": "integer"},
                       "path": {"type": "array", "items": {"type": "integer"}}}}
_FORM = {"type": "object", "required": ["variant", "occurrences"],
         "properties": {"variant": {"type": "string"}, "occurrences": {"type": "array", "items": _OCC}}}
_DELTA = {"type": "array", "items": {"type": "integer"}, "minItems": 4, "maxItems": 4}
_CONSTRAINTS = {"type": "object", "additionalProperties": {"type": "boolean"}}


def _obj(required, **props):
    return {"type": "object", "required": list(required), "properties": props}


RESULTS = {
    "parse": _obj(["forest", "trees", "counts"], forest={"type": "string"},
                  trees={"type": "array", "items": {"type": "string"}}, counts=_COUNTS),
    "enumerate": _obj(["labels", "count", "items"], count={"type": "integer"},
                      items={"type": "array", "items": {"type": "string"}}),
    "coproduct": _obj(["forest", "terms"], terms={"type": "array", "items": _TENSOR_TERM}),
    "antipode": _obj(["forest", "terms"], terms={"type": "array", "items": _TERM}),
    "merge": _obj(["S", "S'", "forest", "terms"], terms={"type": "array", "items": _TERM}),
    "derive": _obj(["initial", "final", "steps"], steps={"type": "array", "items": _obj(
        ["step", "operator", "occurrence", "form", "counts_before", "counts_after", "deltas",
         "constraints"],
        occurrence={"type": "array", "items": _OCC}, counts_before=_COUNTS, counts_after=_COUNTS,
        deltas=_DELTA, constraints=_CONSTRAINTS)}),
    "classify": _obj(["form", "delta", "table_row", "matches_table", "constraints"], form=_FORM,
                     delta=_DELTA, table_row=_DELTA, matches_table={"type": "boolean"},
                     constraints=_CONSTRAINTS),
    "tables": _obj(["per_variant", "yn_computed", "yn_printed", "claims"],
                   yn_computed={"type": "object", "additionalProperties": {"type": "string", "pattern": "^[YN]{4}$"}}),
    "nary lengths": _obj(["n", "lengths"], lengths={"type": "array", "items": {"type": "integer"}}),
    "nary counts": _obj(["n", "k", "nary_tuples", "binary_nonroot", "holds"], holds={"type": "boolean"}),
    "nary merge": _obj(["ops", "forest", "terms"], terms={"type": "array", "items": _TERM}),
    "ds": _obj(["grades", "census"], grades={"type": "array", "items": {"type": "array", "items": _TERM}},
               census={"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}),
    "externalize section": _obj(["tree", "planar", "words"]),
    "externalize project": _obj(["planar", "forest"]),
    "externalize malcev": _obj(["planar", "word"]),
    "externalize filter": _obj(["accepted", "forest", "bit", "component", "kind"],
                               accepted={"type": "boolean"}),
    "externalize dims": _obj(["bits", "rows", "truncated"], truncated={"type": "boolean"},
                             rows={"type": "array", "items": _obj(["grade", "d", "per_bit", "d_L"])}),
    "verify": _obj(["suite", "passed", "params", "checked", "n_failures", "failures", "details"],
                   passed={"type": "boolean"}, checked={"type": "integer"},
                   n_failures={"type": "integer"}),
}


def schema_for(command: str) -> dict:
    """Envelope schema for a command name as printed in ``"command"``."""
    key = "verify" if command.startswith("verify ") else command
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["command", "result"],
        "additionalProperties": False,
        "properties": {"command": {"const": command}, "result": RESULTS[key]},
    }
