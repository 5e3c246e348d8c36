import dataclasses
import importlib
import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wellport.domain import (
    INDICATORS,
    SYMBOL_FIELDS,
    CatalogError,
    DomainError,
    QuantileTriple,
    RiskFactors,
    catalog_from_dict,
    catalog_to_dict,
    load_catalog,
    prior_pos,
    save_catalog,
    validate_catalog,
)

from conftest import project, two_project_catalog

factor = st.floats(min_value=1e-3, max_value=1.0)


@pytest.mark.parametrize(
    "factors, expected",
    [((1, 1, 1, 1, 1), 1.0), ((0.5, 0.5, 1, 1, 1), 0.25), ((0.9, 0.8, 0.7, 0.9, 0.9), 0.40824)],
)
def test_prior_pos_examples(factors, expected):
    assert prior_pos(factors) == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("bad", [(0, 1, 1, 1, 1), (1.2, 1, 1, 1, 1), (0.5, 0.5), (-0.1, 1, 1, 1, 1)])
def test_prior_pos_rejects_bad_factors(bad):
    with pytest.raises(DomainError):
        prior_pos(bad)


@given(st.tuples(factor, factor, factor, factor, factor))
def test_prior_pos_order_invariant(factors):
    base = prior_pos(factors)
    for perm in itertools.permutations(factors):
        assert prior_pos(perm) == pytest.approx(base, rel=1e-12)


def test_well_formed_catalog_is_valid():
    assert validate_catalog(two_project_catalog()) == []


def test_inverted_quantiles_flag_one_field():
    cat = two_project_catalog()
    a = cat.projects[0]
    bad = dataclasses.replace(a, oil=dataclasses.replace(a.oil, area=QuantileTriple(5.0, 3.0, 8.0)))
    cat = dataclasses.replace(cat, projects=(bad, cat.projects[1]))
    problems = validate_catalog(cat)
    assert len(problems) == 1
    assert problems[0].project == "A" and problems[0].field == "oil.area"


def test_risk_factor_disagreement_is_reported():
    a = dataclasses.replace(project("A", p0=0.5), risk_factors=RiskFactors(0.9, 0.9, 0.9, 0.9, 0.9))
    cat = two_project_catalog()
    cat = dataclasses.replace(cat, projects=(a, cat.projects[1]))
    problems = validate_catalog(cat)
    assert [(v.project, v.field) for v in problems] == [("A", "prior_pos")]
    assert "risking factors" in problems[0].message


def test_agreeing_risk_factors_pass():
    factors = RiskFactors(0.9, 0.8, 0.7, 0.9, 0.9)
    a = dataclasses.replace(project("A", p0=prior_pos(factors.as_tuple())), risk_factors=factors)
    cat = two_project_catalog()
    assert validate_catalog(dataclasses.replace(cat, projects=(a, cat.projects[1]))) == []


def test_factors_alone_define_prior():
    a = dataclasses.replace(project("A"), prior_pos=None, risk_factors=RiskFactors(0.5, 0.5, 1, 1, 1))
    assert a.p0 == pytest.approx(0.25)


def test_mandatory_second_stage_is_invalid():
    cat = two_project_catalog()
    b = dataclasses.replace(cat.projects[1], mandatory=True)
    cat = dataclasses.replace(cat, projects=(cat.projects[0], b))
    assert [v.field for v in validate_catalog(cat)] == ["mandatory"]


def test_bounded_parameter_above_one():
    cat = two_project_catalog()
    a = cat.projects[0]
    bad = dataclasses.replace(a, gas=dataclasses.replace(a.gas, porosity=QuantileTriple(0.5, 0.9, 1.1)))
    cat = dataclasses.replace(cat, projects=(bad, cat.projects[1]))
    assert [v.field for v in validate_catalog(cat)] == ["gas.porosity"]


def test_constraint_invariants():
    cat = two_project_catalog().with_constraints(budget_first=5000.0, posterior_bounds=(0.6, 0.4))
    fields = {v.field for v in validate_catalog(cat)}
    assert fields == {"constraints.budget_first", "constraints.posterior_bounds"}


def test_unknown_trigger_ids():
    cat = two_project_catalog()
    cat = dataclasses.replace(cat, triggers={"B": cat.triggers["B"].__class__(failure=("Z",))})
    assert [v.field for v in validate_catalog(cat)] == ["triggers.failure"]


def test_validation_is_idempotent_and_pure(bundled):
    before = bundled.digest()
    assert validate_catalog(bundled) == validate_catalog(bundled) == []
    assert bundled.digest() == before


def test_round_trip(tmp_path, bundled):
    path = tmp_path / "cat.json"
    save_catalog(bundled, path)
    again = load_catalog(path)
    assert again.digest() == bundled.digest()
    assert catalog_to_dict(again) == catalog_to_dict(bundled)


def test_default_posterior_bounds():
    doc = catalog_to_dict(two_project_catalog())
    doc["constraints"].pop("posterior_bounds")
    assert catalog_from_dict(doc).constraints.posterior_bounds == (0.01, 0.99)


def test_catalog_top_level_keys():
    assert set(catalog_to_dict(two_project_catalog())) >= {"projects", "links", "triggers", "constraints"}


def test_unreadable_catalog(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(CatalogError):
        load_catalog(path)


def test_arrays_follow_categories(bundled):
    arr = bundled.arrays
    for j, p in enumerate(bundled.second_stage):
        assert arr.cat_second[j] == ("trap", "appraisal", "mature").index(p.category)
    assert arr.theta.shape == (len(arr.second_ids), len(arr.first_ids))
    assert list(arr.mandatory) == [p.mandatory for p in bundled.first_stage]


def test_six_indicators():
    assert INDICATORS == ("po", "pg", "co", "cg", "ro", "rg")


NOTATION = (
    "I J q s k S K Omega M omega M_act I_fix I_trap J_trap I_app J_app a A_j A_j_plus A_j_minus A_j_zero "
    "x y xi zeta e p0 p_post theta Delta pi_o pi_g u_o u_g eta_o eta_g f tau delta lambda_o lambda_g "
    "kappa_o kappa_g p_lower p_upper c w l R_o R_g r V Z L R_m Gamma B1 N1 B N B_trap B_app H_m alpha_m "
    "alpha_joint rho_min alpha_sr beta C1 W1 B_bar N_bar nu v gamma Q_s"
).split()


def _resolves(target: str) -> bool:
    module_name, path = target.split(":")
    obj = importlib.import_module(f"wellport.{module_name}")
    *owners, leaf = path.split(".")
    for name in owners:
        obj = getattr(obj, name)
    if dataclasses.is_dataclass(obj) and leaf in {f.name for f in dataclasses.fields(obj)}:
        return True
    return hasattr(obj, leaf)


def test_every_model_symbol_has_one_home():
    assert set(SYMBOL_FIELDS) == set(NOTATION)
    assert len(NOTATION) == len(set(NOTATION))
    unresolved = [s for s, t in SYMBOL_FIELDS.items() if not _resolves(t)]
    assert unresolved == []


def test_catalog_file_is_json(bundled, tmp_path):
    path = tmp_path / "c.json"
    save_catalog(bundled, path)
    assert json.loads(path.read_text())["constraints"]["cvar_beta"] == bundled.constraints.cvar_beta
