import json

import pytest

from topocert.config import loads_config, load_config
from topocert.errors import ConfigError, ExclusivityError, OverlapError

from conftest import CONFIGS


def test_shipped_configs_load():
    cfg = load_config(CONFIGS / "six_qubit.json")
    assert [n for n, _ in cfg.networks] == ["ghz6", "ghz4_bell", "bell_ghz4", "three_bell"]
    assert [c.label for c in cfg.candidates] == ["H1", "H2", "H3", "H4"]
    assert load_config(CONFIGS / "ghz3_mermin.json").networks[1][1].misalignment[0] == 0.1


def test_round_trip_is_identity():
    cfg = load_config(CONFIGS / "six_qubit.json")
    again = loads_config(cfg.dumps())
    assert again.dumps() == cfg.dumps()
    assert again.to_dict() == cfg.to_dict()


def _base():
    return json.loads((CONFIGS / "six_qubit.json").read_text())


def test_json_syntax_error_reports_line():
    with pytest.raises(ConfigError, match="line 2 column"):
        loads_config('{\n  "networks": [,]\n}')


def test_overlap_error_names_field():
    obj = _base()
    obj["networks"][1]["sources"][1]["qubits"] = [4, 5, 6]
    with pytest.raises(OverlapError, match=r"networks\[1\].sources"):
        loads_config(json.dumps(obj))


@pytest.mark.parametrize("mutate, pattern", [
    (lambda o: o.pop("candidates"), "missing field 'candidates'"),
    (lambda o: o.__setitem__("mode", "fast"), "mode"),
    (lambda o: o.__setitem__("shots", 0), "shots"),
    (lambda o: o["networks"][0]["sources"][0].__setitem__("noise", {"kind": "werner"}), r"noise: missing field 'v'"),
    (lambda o: o["networks"][0]["sources"][0].__setitem__("noise", {"kind": "thermal"}), "unknown noise kind"),
    (lambda o: o["networks"][0]["sources"][0].__setitem__("phase", "?"), r"sources\[0\].phase"),
])
def test_field_diagnostics(mutate, pattern):
    obj = _base()
    mutate(obj)
    with pytest.raises(ConfigError, match=pattern):
        loads_config(json.dumps(obj))


def test_nonexclusive_candidates_rejected():
    obj = _base()
    obj["candidates"].append({"label": "H5", "blocks": [[1, 2], [3, 4], [5, 6]]})
    with pytest.raises(ExclusivityError, match="H4.*H5"):
        loads_config(json.dumps(obj))
