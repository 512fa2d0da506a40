import json

import numpy as np
import pytest

from service.dual_functionals import Functional, structure_residuals
from service.hypergroup import build_hypergroup_from_idempotent
from service.poisson import PoissonDecomposition
from service.presentation_io import (
    SCHEMA,
    PresentationFormatError,
    decomposition_to_dict,
    dumps,
    encode_sparse,
    functional_from_data,
    functional_to_dict,
    load_functional,
    load_quantum_group,
    presentation_from_dict,
    presentation_to_dict,
    quantum_group_from_dict,
    quantum_group_to_dict,
    read_json,
)
from service.quantum_group import verify_cqg
from tests.conftest import point_mass


@pytest.fixture
def z3_table():
    return [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


class TestQuantumGroupDocuments:
    """量子群 JSON の読み書きテスト"""

    def test_explicit_document_reproduces_structure(self, g_s3):
        data = json.loads(dumps(quantum_group_to_dict(g_s3)))

        loaded = quantum_group_from_dict(data)

        assert verify_cqg(loaded).passed
        assert structure_residuals(g_s3, loaded).passed

    def test_document_fields(self, c_z2):
        data = quantum_group_to_dict(c_z2)

        assert data['schema'] == SCHEMA
        assert data['kind'] == 'quantum_group'
        assert data['dim'] == 2
        assert 'antipode' in data
        assert all(len(entry) == 5 for entry in data['comul'])

    def test_hypergroup_document(self, c_z4):
        H = build_hypergroup_from_idempotent(c_z4, point_mass(4, 0, 2))

        data = quantum_group_to_dict(H)

        assert data['kind'] == 'hypergroup'
        assert 'kappa' in data and 'antipode' not in data

    def test_haar_is_computed_when_missing(self, c_z3):
        data = quantum_group_to_dict(c_z3)
        del data['haar']

        loaded = quantum_group_from_dict(data)

        np.testing.assert_allclose(loaded.haar, np.full(3, 1 / 3), atol=1e-10)

    def test_group_table_function_algebra(self, z3_table):
        qg = quantum_group_from_dict({'schema': SCHEMA, 'kind': 'group', 'name': 'Z3', 'table': z3_table})

        assert qg.name == 'c:Z3'
        assert verify_cqg(qg).passed

    def test_group_table_group_algebra(self, z3_table):
        qg = quantum_group_from_dict({'kind': 'group', 'table': z3_table, 'algebra': 'g'})

        assert qg.name.startswith('g:')

    def test_presentation_document(self, g_s3):
        pres = presentation_from_dict(presentation_to_dict(g_s3.algebra))

        np.testing.assert_allclose(pres.mul, g_s3.algebra.mul)

    def test_sparse_encoding_skips_zeros(self):
        t = np.zeros((2, 2))
        t[1, 0] = 2.5

        assert encode_sparse(t) == [[1, 0, 2.5, 0.0]]


class TestFormatErrors:
    """入力不備のテスト"""

    def test_not_an_object(self):
        with pytest.raises(PresentationFormatError) as excinfo:
            quantum_group_from_dict([1, 2])

        assert excinfo.value.field == '$'

    def test_unknown_schema(self, c_z2):
        data = quantum_group_to_dict(c_z2)
        data['schema'] = 'fqg/0'

        with pytest.raises(PresentationFormatError) as excinfo:
            quantum_group_from_dict(data)

        assert excinfo.value.field == 'schema'

    @pytest.mark.parametrize('field', ['dim', 'mul', 'comul', 'counit', 'antipode'])
    def test_missing_field(self, c_z2, field):
        data = quantum_group_to_dict(c_z2)
        del data[field]

        with pytest.raises(PresentationFormatError) as excinfo:
            quantum_group_from_dict(data)

        assert excinfo.value.field == field

    def test_bad_complex(self, c_z2):
        data = quantum_group_to_dict(c_z2)
        data['counit'][0] = [1.0, 2.0, 3.0]

        with pytest.raises(PresentationFormatError, match=r"\[re, im\]") as excinfo:
            quantum_group_from_dict(data)

        assert excinfo.value.field == 'counit[0]'

    def test_sparse_index_out_of_range(self, c_z2):
        data = quantum_group_to_dict(c_z2)
        data['mul'].append([0, 0, 5, 1.0, 0.0])

        with pytest.raises(PresentationFormatError, match="範囲外"):
            quantum_group_from_dict(data)

    def test_invalid_group_table(self):
        with pytest.raises(PresentationFormatError) as excinfo:
            quantum_group_from_dict({'kind': 'group', 'table': [[0, 1], [1, 1]]})

        assert excinfo.value.field == 'table'

    def test_unknown_algebra_flavour(self, z3_table):
        with pytest.raises(PresentationFormatError) as excinfo:
            quantum_group_from_dict({'kind': 'group', 'table': z3_table, 'algebra': 'x'})

        assert excinfo.value.field == 'algebra'


class TestFunctionalDocuments:
    """汎関数・分解結果の入出力テスト"""

    def test_bare_list(self):
        phi = functional_from_data([[0.25, 0.0], 0.75], 2)

        np.testing.assert_allclose(phi.covec, [0.25, 0.75])

    def test_document(self):
        data = functional_to_dict(Functional(np.array([1.0, 0.5j])))

        assert data['kind'] == 'functional'
        np.testing.assert_allclose(functional_from_data(data, 2).covec, [1.0, 0.5j])

    def test_wrong_length(self):
        with pytest.raises(PresentationFormatError, match="長さ 3"):
            functional_from_data([1.0, 0.0], 3)

    def test_decomposition(self):
        dec = PoissonDecomposition(Functional(np.array([1.0, 0.0])), 3.0, Functional(np.array([0.0, 1.0])))

        data = decomposition_to_dict(dec)

        assert data['kind'] == 'poisson_decomposition'
        assert data['rate'] == 3.0


class TestFiles:
    """ファイル入出力のテスト"""

    def test_load_files(self, tmp_path, c_z2):
        qg_path = tmp_path / "z2.json"
        qg_path.write_text(dumps(quantum_group_to_dict(c_z2)), encoding='utf-8')
        phi_path = tmp_path / "phi.json"
        phi_path.write_text(json.dumps([[0.5, 0.0], [0.5, 0.0]]), encoding='utf-8')

        qg = load_quantum_group(qg_path)
        phi = load_functional(phi_path, qg.dim)

        assert qg.dim == 2
        np.testing.assert_allclose(phi.covec, [0.5, 0.5])

    def test_missing_file(self, tmp_path):
        with pytest.raises(PresentationFormatError, match="見つかりません"):
            read_json(tmp_path / "missing.json")

    def test_syntax_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ invalid", encoding='utf-8')

        with pytest.raises(PresentationFormatError, match="構文エラー"):
            read_json(path)

    def test_dumps_is_deterministic(self):
        assert dumps({'b': 1, 'a': 'α'}) == '{\n  "a": "α",\n  "b": 1\n}'
