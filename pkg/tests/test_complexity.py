import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from encost.complexity import (
    ComplexityTriple,
    DenseInput,
    SparseInput,
    basic_matmul_complexity,
    builtin_matrix_catalog,
    ceil_log2,
    co_matmul_complexity,
    csb_complexity,
    csc_complexity,
    csr_complexity,
    default_block_dim,
    dump_matrix_catalog,
    get_model,
    parse_matrix_catalog,
)
from encost.errors import (
    CacheGeometryError,
    CatalogFormatError,
    DegenerateInputError,
    InvalidArgumentError,
    MissingCoreCountError,
    UnknownNameError,
)


def sparse(n, m, nz, nc, nr=None, beta=None, name="t"):
    return SparseInput(name=name, rows=n, cols=m, nonzeros=nz, max_nnz_per_col=nc,
                       max_nnz_per_row=nr, block_dim=beta)


@pytest.mark.parametrize("x, expected", [
    (1, 0), (2, 1), (3, 2), (4, 2), (1024, 10),
    (116158, 17), (986703, 20), (4690002, 23),
    (340.639, 9), (1.0, 0), (0.5, 0),
])
def test_ceil_log2(x, expected):
    assert ceil_log2(x) == expected


class TestCsr:
    def test_hand_evaluated_row(self):
        triple = csr_complexity(sparse(1024, 1024, 4096, nc=4, nr=4))
        assert triple == ComplexityTriple(work=4096, span=14, io=4096)

    def test_torso1_work_and_io(self, torso1):
        # per-row maximum is unpublished; treat it as column-symmetric here
        inp = replace(torso1, max_nnz_per_row=torso1.max_nnz_per_col)
        triple = csr_complexity(inp)
        assert triple.work == 8516500
        assert triple.io == 8516500

    def test_smallest_instance_clamps_span_to_work(self):
        # the span bound nr + ceil(log2 n) = 2 exceeds the single flop of work
        triple = csr_complexity(sparse(2, 2, 1, nc=1, nr=1))
        assert triple == ComplexityTriple(work=1, span=1, io=1)

    def test_single_row_rejected(self):
        with pytest.raises(DegenerateInputError):
            csr_complexity(sparse(1, 4, 2, nc=1, nr=2))

    def test_missing_row_maximum_rejected(self):
        with pytest.raises(InvalidArgumentError, match="max_nnz_per_row"):
            csr_complexity(sparse(4, 4, 8, nc=2))


class TestCsc:
    def test_torso1_span(self, torso1):
        triple = csc_complexity(torso1)
        assert triple.span == 1200 + 17 == 1217

    def test_bone010(self, matrices_by_name):
        triple = csc_complexity(matrices_by_name["bone010"])
        assert triple == ComplexityTriple(work=47851783, span=83, io=47851783)

    def test_smallest_instance(self):
        triple = csc_complexity(sparse(2, 2, 2, nc=1))
        assert triple == ComplexityTriple(work=2, span=2, io=2)

    def test_same_work_and_io_as_csr(self):
        inp = sparse(256, 256, 3000, nc=17, nr=9)
        a, b = csr_complexity(inp), csc_complexity(inp)
        assert (a.work, a.io) == (b.work, b.io)


class TestCsb:
    def test_torso1_hand_evaluated(self, torso1):
        # beta = 341 = default for 116158 rows; B = 8
        triple = csb_complexity(replace(torso1, block_dim=341), cacheline_elements=8)
        assert triple == ComplexityTriple(work=8632536, span=3410, io=1180598)

    def test_default_block_dim(self):
        assert default_block_dim(116158) == 341
        assert default_block_dim(64) == 8
        assert default_block_dim(1) == 1
        assert default_block_dim(2) == 2

    def test_single_block_degenerate_case(self):
        n, nz = 64, 100
        triple = csb_complexity(sparse(n, n, nz, nc=4, beta=n), cacheline_elements=8)
        assert triple.work == 1 + nz
        assert triple.io == 1 + math.ceil(nz / 8)
        assert triple.span == n  # one block processed serially along its dimension

    def test_work_never_below_plain_nonzero_count(self):
        # the block-bookkeeping term only adds work
        for inp in builtin_matrix_catalog():
            assert csb_complexity(inp, 8).work >= inp.nonzeros

    def test_io_below_csc_for_all_catalog_matrices(self):
        for inp in builtin_matrix_catalog():
            assert csb_complexity(inp, 8).io < csc_complexity(inp).io, inp.name

    def test_block_dim_validation(self):
        with pytest.raises(InvalidArgumentError, match="block_dim"):
            sparse(8, 8, 4, nc=2, beta=9)


class TestBasicMatmul:
    def test_unit_case(self):
        triple = basic_matmul_complexity(DenseInput(1, 1, 1), cacheline_elements=1, core_count=1)
        assert triple == ComplexityTriple(work=2, span=2, io=3)

    def test_hand_evaluated_1024_cube(self):
        triple = basic_matmul_complexity(DenseInput(1024, 1024, 1024), 8, core_count=24)
        assert triple == ComplexityTriple(work=2147483648, span=89478486, io=134479872)

    def test_io_affine_in_p(self):
        def io_at(p):
            return basic_matmul_complexity(DenseInput(64, 64, p), 8, 4).io
        assert io_at(16) - io_at(8) == io_at(24) - io_at(16)

    def test_core_count_required(self):
        with pytest.raises(InvalidArgumentError):
            basic_matmul_complexity(DenseInput(8, 8, 8), 8, core_count=0)


class TestCoMatmul:
    def test_hand_evaluated_1024_cube(self):
        triple = co_matmul_complexity(DenseInput(1024, 1024, 1024), 8, 32768, core_count=24)
        assert triple.work == 2147483648
        assert triple.span == 89478486
        assert triple.io == 1137744

    def test_io_beats_basic_for_square_sizes(self):
        for n in (64, 128, 256, 512, 1024, 2048):
            d = DenseInput(n, n, n)
            assert co_matmul_complexity(d, 8, 32768, 24).io < basic_matmul_complexity(d, 8, 24).io

    def test_unit_case(self):
        triple = co_matmul_complexity(DenseInput(1, 1, 1), 1, 4, core_count=1)
        assert triple.work == 2
        assert triple.span * 1 == 2

    def test_same_work_and_span_as_basic(self):
        d = DenseInput(100, 60, 250)
        a = basic_matmul_complexity(d, 8, 7)
        b = co_matmul_complexity(d, 8, 32768, 7)
        assert (a.work, a.span) == (b.work, b.span)

    def test_cache_geometry_guard(self):
        with pytest.raises(CacheGeometryError):
            co_matmul_complexity(DenseInput(8, 8, 8), cacheline_elements=8,
                                 private_cache_elements=63, core_count=1)


class TestTripleInvariants:
    sparse_inputs = st.builds(
        lambda n, m, nz_frac, nc_frac, nr_frac: sparse(
            n, m,
            max(1, int(nz_frac * n * m)),
            nc=max(1, int(nc_frac * n)),
            nr=max(1, int(nr_frac * m)),
        ),
        n=st.integers(2, 5000),
        m=st.integers(1, 5000),
        nz_frac=st.floats(0.0, 1.0),
        nc_frac=st.floats(0.0, 1.0),
        nr_frac=st.floats(0.0, 1.0),
    )

    @given(inp=sparse_inputs, b=st.sampled_from([1, 2, 4, 8, 16]))
    @settings(max_examples=200)
    def test_sparse_models_produce_valid_triples(self, inp, b):
        for triple in (csr_complexity(inp), csc_complexity(inp), csb_complexity(inp, b)):
            assert triple.work >= triple.span >= 1
            assert triple.io >= 0

    @given(n=st.integers(1, 300), m=st.integers(1, 300), p=st.integers(1, 300),
           cores=st.integers(1, 64))
    @settings(max_examples=200)
    def test_dense_models_produce_valid_triples(self, n, m, p, cores):
        d = DenseInput(n, m, p)
        for triple in (basic_matmul_complexity(d, 8, cores),
                       co_matmul_complexity(d, 8, 32768, cores)):
            assert triple.work >= triple.span >= 1
            assert triple.io >= 0

    def test_models_deterministic(self, torso1):
        assert csb_complexity(torso1, 8) == csb_complexity(torso1, 8)

    def test_zero_work_triple_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ComplexityTriple(work=0, span=0, io=5)

    def test_span_above_work_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ComplexityTriple(work=3, span=4, io=0)


class TestModelRegistry:
    def test_five_models(self):
        for name in ("csr", "csc", "csb", "basic-matmul", "co-matmul"):
            assert get_model(name).name == name

    def test_boundedness_hints(self):
        assert get_model("csc").boundedness_hint == "memory-bound"
        assert get_model("basic-matmul").boundedness_hint == "cpu-bound"

    def test_unknown_model(self):
        with pytest.raises(UnknownNameError):
            get_model("bsr")

    def test_kind_mismatch_rejected(self, xeon, torso1):
        with pytest.raises(InvalidArgumentError):
            get_model("basic-matmul").evaluate(torso1, xeon)

    def test_matmul_needs_profile_core_count(self, catalog_by_name):
        nehalem = catalog_by_name["Nehalem i7-950"]
        with pytest.raises(MissingCoreCountError, match="core_count"):
            get_model("basic-matmul").evaluate(DenseInput(8, 8, 8), nehalem)

    def test_csb_uses_profile_cacheline(self, xeon, torso1):
        direct = csb_complexity(torso1, xeon.cacheline_elements)
        assert get_model("csb").evaluate(torso1, xeon) == direct


class TestMatrixCatalog:
    def test_nine_entries(self):
        assert len(builtin_matrix_catalog()) == 9

    def test_kkt_power_row(self, matrices_by_name):
        kkt = matrices_by_name["kkt_power"]
        assert (kkt.rows, kkt.cols, kkt.nonzeros, kkt.max_nnz_per_col) == (
            2063494, 2063494, 12771361, 90)

    def test_rucci1_row(self, matrices_by_name):
        r = matrices_by_name["Rucci1"]
        assert (r.rows, r.cols, r.nonzeros, r.max_nnz_per_col) == (
            1977885, 109900, 7791168, 108)

    def test_round_trip(self):
        text = dump_matrix_catalog(builtin_matrix_catalog())
        assert parse_matrix_catalog(text) == builtin_matrix_catalog()

    def test_malformed_named(self):
        with pytest.raises(CatalogFormatError, match="nonzeros"):
            parse_matrix_catalog("[m]\nrows = 4\ncols = 4\nmax_nnz_per_col = 1\n")
