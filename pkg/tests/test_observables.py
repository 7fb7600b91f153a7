import numpy as np
import pytest

from Shadows.dense_sim import exact_majorana_expectations, exact_rdm, observable_dense, operator_sequence_dense, random_mixed
from Shadows.majorana import FermionTerm, MajoranaIndexError
from Shadows.mappings import MappingError, get_mapping
from Shadows.observables import (
    HamiltonianParseError,
    MissingEstimateError,
    NonHermitianError,
    ObservableDecomposition,
    assemble_rdm,
    hamiltonian_variance_report,
    ingest_hamiltonian,
    observable_from_terms,
    rdm_to_rows,
)


def _write(tmp_path, text):
    path = tmp_path / 'h.txt'
    path.write_text(text, encoding='utf-8')
    return path


def test_number_operator_file(tmp_path):
    h = ingest_hamiltonian(_write(tmp_path, '1.0 0^ 0\n'))
    assert h.n == 1
    assert h.identity == pytest.approx(0.5)
    assert h.coefficients == {(0, 1): pytest.approx(-0.5)}


def test_comments_blank_lines_and_explicit_modes(tmp_path):
    text = '# hopping\n\n0.5 0^ 1   # forward\n0.5 1^ 0\n'
    h = ingest_hamiltonian(_write(tmp_path, text), n=3)
    assert h.n == 3
    expected = operator_sequence_dense([(0, True), (1, False)], 3) * 0.5 + operator_sequence_dense([(1, True), (0, False)], 3) * 0.5
    assert np.allclose(observable_dense(h), expected)


def test_empty_file_is_zero_observable(tmp_path):
    h = ingest_hamiltonian(_write(tmp_path, '# nothing here\n'))
    assert h.coefficients == {} and h.identity == 0


def test_non_hermitian_rejected(tmp_path):
    with pytest.raises(NonHermitianError):
        ingest_hamiltonian(_write(tmp_path, '1.0 0^ 1\n'))


def test_parse_errors_carry_line_numbers(tmp_path):
    with pytest.raises(HamiltonianParseError) as exc:
        ingest_hamiltonian(_write(tmp_path, '1.0 0^ 0\nabc 0^ 0\n'))
    assert exc.value.line_no == 2
    with pytest.raises(HamiltonianParseError) as exc:
        ingest_hamiltonian(_write(tmp_path, '1.0 0^ x\n'))
    assert exc.value.line_no == 1
    with pytest.raises(HamiltonianParseError):
        ingest_hamiltonian(_write(tmp_path, '1.0 3^ 3\n'), n=2)


def test_observable_from_terms_matches_dense():
    terms = [FermionTerm((0,), (1,), 0.3), FermionTerm((1,), (0,), 0.3), (2.0, [(1, True), (1, False)])]
    h = observable_from_terms(terms, 2)
    expected = 0.3 * operator_sequence_dense([(0, True), (1, False)], 2)
    expected = expected + 0.3 * operator_sequence_dense([(1, True), (0, False)], 2)
    expected = expected + 2.0 * operator_sequence_dense([(1, True), (1, False)], 2)
    assert np.allclose(observable_dense(h), expected)
    with pytest.raises(MajoranaIndexError):
        observable_from_terms([FermionTerm((2,), (2,))], 2)


def test_decomposition_validation():
    with pytest.raises(MajoranaIndexError):
        ObservableDecomposition(2, {(0,): 1.0})
    with pytest.raises(MajoranaIndexError):
        ObservableDecomposition(1, {(0, 2): 1.0})
    h = ObservableDecomposition(2, {(0, 1): 1.0, (0, 1, 2, 3): 2.0}, identity=0.5)
    assert set(h.by_degree()) == {2, 4}
    g = {(0, 1): -1.0, (0, 1, 2, 3): 0.5}
    assert h.expectation(g) == pytest.approx(0.0)
    assert h.expectation(g, include_identity=True) == pytest.approx(0.5)


@pytest.mark.parametrize('k', [1, 2])
def test_assemble_rdm_with_exact_expectations(k):
    n = 3
    state = random_mixed(n, 31)
    g = exact_majorana_expectations(state, 2 * k)
    assembled = assemble_rdm(g, n, k)
    assert np.allclose(assembled.matrix, exact_rdm(state, k).matrix, atol=1e-10)
    assert assembled.hermiticity_residual() < 1e-10


def test_zero_estimates_give_half_identity():
    g = {mu: 0.0 for mu in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]}
    rdm = assemble_rdm(g, 2, 1)
    assert np.allclose(rdm.matrix, np.eye(2) / 2)


def test_missing_estimate():
    with pytest.raises(MissingEstimateError):
        assemble_rdm({(0, 1): 0.0}, 2, 1)


def test_rdm_rows():
    rdm = assemble_rdm({mu: 0.0 for mu in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]}, 2, 1)
    rows = rdm_to_rows(rdm)
    assert len(rows) == 4
    assert rows[0] == {'p': '0', 'q': '0', 'real': 0.5, 'imag': 0.0}


def test_variance_report():
    h = ObservableDecomposition(2, {(0, 1): 1.0}, identity=0.25)
    report = hamiltonian_variance_report(h, 0.0)
    assert report.total_norm_sq == pytest.approx(3.0)
    assert report.variance == pytest.approx(3.0)
    assert report.contributions == {2: pytest.approx(3.0)}
    assert report.term_counts == {2: 1}
    assert hamiltonian_variance_report(h, -1.0).variance == pytest.approx(2.0)
    assert hamiltonian_variance_report(ObservableDecomposition(2), 0.0).variance == 0.0


def test_variance_report_pauli_baseline():
    h = ObservableDecomposition(2, {(1, 2): 1.0, (0, 1): 0.5})
    jw = hamiltonian_variance_report(h, 0.0)
    assert jw.mapping == 'jw'
    assert jw.pauli_norm_sq == pytest.approx(9 + 0.25 * 3)
    bk = hamiltonian_variance_report(h, 0.0, get_mapping('bk', 2))
    assert bk.mapping == 'bk'
    assert bk.pauli_norm_sq == pytest.approx(3 + 0.25 * 3)
    assert bk.total_norm_sq == jw.total_norm_sq
    with pytest.raises(MappingError):
        hamiltonian_variance_report(h, 0.0, get_mapping('jw', 3))
