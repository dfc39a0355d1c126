#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <gnorm/graph.hpp>
#include <gnorm/norm.hpp>
#include <gnorm/rng.hpp>

using namespace gnorm;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("q_gcn hand-computed cases") {
    DenseMatrix qk3 = q_gcn(adjacency(make_complete_graph(3)));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(qk3(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    Graph lone;
    lone.n = 1;
    DenseMatrix q1 = q_gcn(adjacency(lone));
    CHECK(q1(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    Graph p2;
    p2.n = 2;
    p2.edges = {{0, 1}};
    DenseMatrix qp = q_gcn(adjacency(p2));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(qp(i, j) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("q_gin cases") {
    DenseMatrix a = adjacency(make_complete_graph(3));
    DenseMatrix q0 = q_gin(a, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(q0(i, j) == 1.0);

    DenseMatrix q1 = q_gin(a, 1.0);  // all-ones plus identity
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(q1(i, j) == (i == j ? 2.0 : 1.0));

    DenseMatrix qe = q_gin(DenseMatrix(2, 2), 0.5);
    CHECK(qe(0, 0) == 1.5);
    CHECK(qe(1, 1) == 1.5);
    CHECK(qe(0, 1) == 0.0);
}

TEST_CASE("shift matrix structure") {
    DenseMatrix n1 = shift_matrix(1);
    CHECK(n1(0, 0) == 0.0);

    DenseMatrix n2 = shift_matrix(2);
    CHECK(n2(0, 0) == doctest::Approx(0.5));
    CHECK(n2(0, 1) == doctest::Approx(-0.5));

    for (std::size_t n = 2; n <= 12; ++n) {
        DenseMatrix m = shift_matrix(n);
        CHECK(frobenius_norm(sub(m, transpose(m))) == 0.0);
        CHECK(frobenius_norm(sub(matmul(m, m), m)) <= 1e-12);  // idempotent
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += m(i, j);
            CHECK(std::abs(row) <= 1e-12);  // annihilates the ones vector
        }
        // Rank n-1: n-1 unit singular values and one zero.
        Spectrum s = singular_values(m);
        for (std::size_t i = 0; i + 1 < n; ++i)
            CHECK(s.values[i] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(s.values[n - 1] <= 1e-9);
    }
}

TEST_CASE("instance normalization of {1,2,3} matches hand computation") {
    DenseMatrix h{{1, 2, 3}};
    NormSpec spec = NormSpec::make(NormKind::Instance, 1, /*eps=*/0.0);
    DenseMatrix out = normalize(h, {3}, spec, nullptr, NormMode::Train);
    CHECK(out(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(out(0, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(out(0, 2) == doctest::Approx(1.2247).epsilon(1e-4));
}

TEST_CASE("graph normalization on the triangle with one-hot degrees is zero") {
    Graph k3 = make_complete_graph(3);
    DenseMatrix h0 = one_hot_degree_features(k3, 3);
    DenseMatrix pre = matmul(h0, q_gin(adjacency(k3), 0.0));  // identical columns
    NormSpec spec = NormSpec::make(NormKind::Graph, pre.rows());
    DenseMatrix out = normalize(pre, {3}, spec, nullptr, NormMode::Train);
    CHECK(max_abs(out) <= 1e-12);
}

TEST_CASE("graph normalization with alpha=0 gives unit second moments") {
    Rng rng(31);
    DenseMatrix h = random_matrix(3, 6, rng);
    NormSpec spec = NormSpec::make(NormKind::Graph, 3, /*eps=*/0.0);
    std::fill(spec.alpha.begin(), spec.alpha.end(), 0.0);
    DenseMatrix out = normalize(h, {6}, spec, nullptr, NormMode::Train);
    for (std::size_t j = 0; j < 3; ++j) {
        double m2 = 0.0;
        for (std::size_t c = 0; c < 6; ++c) m2 += out(j, c) * out(j, c);
        CHECK(m2 / 6.0 == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("graph norm with alpha=1 reduces to instance norm") {
    Rng rng(37);
    for (int t = 0; t < 50; ++t) {
        DenseMatrix h = random_matrix(4, 9, rng);
        std::vector<std::size_t> offsets{4, 9};  // two graphs of 4 and 5 nodes
        NormSpec gspec = NormSpec::make(NormKind::Graph, 4);
        NormSpec ispec = NormSpec::make(NormKind::Instance, 4);
        DenseMatrix go = normalize(h, offsets, gspec, nullptr, NormMode::Train);
        DenseMatrix io = normalize(h, offsets, ispec, nullptr, NormMode::Train);
        CHECK(max_abs_diff(go, io) <= 1e-12);
    }
}

TEST_CASE("matrix-form path agrees with instance normalization") {
    Rng rng(41);
    DenseMatrix whq = random_matrix(5, 7, rng);
    NormSpec spec = NormSpec::make(NormKind::Instance, 5);
    DenseMatrix via_stats = normalize(whq, {7}, spec, nullptr, NormMode::Train);
    DenseMatrix via_matrix = apply_shift_scale(whq);
    CHECK(max_abs_diff(via_stats, via_matrix) <= 1e-9);
}

TEST_CASE("batch normalization standardizes per feature and tracks running stats") {
    Rng rng(43);
    DenseMatrix h = random_matrix(3, 20, rng);
    NormSpec spec = NormSpec::make(NormKind::Batch, 3, /*eps=*/0.0);
    BatchNormState state = BatchNormState::make(3);
    DenseMatrix out = normalize(h, {10, 20}, spec, &state, NormMode::Train);
    for (std::size_t j = 0; j < 3; ++j) {
        double m = 0.0, v = 0.0;
        for (std::size_t c = 0; c < 20; ++c) m += out(j, c);
        m /= 20.0;
        for (std::size_t c = 0; c < 20; ++c) v += (out(j, c) - m) * (out(j, c) - m);
        v /= 20.0;
        CHECK(std::abs(m) <= 1e-10);
        CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(state.running_mean[j] != 0.0);  // updated from the init
    }

    // Batch over a single-graph batch equals instance normalization.
    DenseMatrix single = random_matrix(3, 6, rng);
    BatchNormState s2 = BatchNormState::make(3);
    NormSpec bspec = NormSpec::make(NormKind::Batch, 3);
    NormSpec ispec = NormSpec::make(NormKind::Instance, 3);
    DenseMatrix bo = normalize(single, {6}, bspec, &s2, NormMode::Train);
    DenseMatrix io = normalize(single, {6}, ispec, nullptr, NormMode::Train);
    CHECK(max_abs_diff(bo, io) <= 1e-12);
}

TEST_CASE("batch normalization eval mode uses running statistics") {
    DenseMatrix h{{2, 4}};
    NormSpec spec = NormSpec::make(NormKind::Batch, 1, /*eps=*/0.0);
    BatchNormState state = BatchNormState::make(1);
    state.running_mean = {3.0};
    state.running_var = {4.0};
    DenseMatrix out = normalize(h, {2}, spec, &state, NormMode::Eval);
    CHECK(out(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(out(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(state.running_mean[0] == 3.0);  // eval must not mutate
}

TEST_CASE("layer normalization standardizes each node column") {
    Rng rng(47);
    DenseMatrix h = random_matrix(6, 4, rng);
    NormSpec spec = NormSpec::make(NormKind::Layer, 6, /*eps=*/0.0);
    DenseMatrix out = normalize(h, {4}, spec, nullptr, NormMode::Train);
    for (std::size_t c = 0; c < 4; ++c) {
        double m = 0.0, v = 0.0;
        for (std::size_t j = 0; j < 6; ++j) m += out(j, c);
        m /= 6.0;
        for (std::size_t j = 0; j < 6; ++j) v += (out(j, c) - m) * (out(j, c) - m);
        v /= 6.0;
        CHECK(std::abs(m) <= 1e-10);
        CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("normalize shape errors") {
    DenseMatrix h(2, 5);
    NormSpec spec = NormSpec::make(NormKind::Instance, 2);
    CHECK_THROWS_AS(normalize(h, {4}, spec, nullptr, NormMode::Train),
                    std::invalid_argument);
    NormSpec bad = NormSpec::make(NormKind::Instance, 3);
    CHECK_THROWS_AS(normalize(h, {5}, bad, nullptr, NormMode::Train),
                    std::invalid_argument);
    NormSpec bspec = NormSpec::make(NormKind::Batch, 2);
    CHECK_THROWS_AS(normalize(h, {5}, bspec, nullptr, NormMode::Train),
                    std::invalid_argument);  // missing state
}

TEST_CASE("single-node graph normalizes to beta") {
    DenseMatrix h{{7.0}};
    NormSpec spec = NormSpec::make(NormKind::Graph, 1);
    spec.beta = {0.25};
    DenseMatrix out = normalize(h, {1}, spec, nullptr, NormMode::Train);
    CHECK(out(0, 0) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("normalize_backward matches finite differences for every kind") {
    Rng rng(53);
    const std::size_t d = 3, cols = 7;
    std::vector<std::size_t> offsets{3, 7};
    DenseMatrix h = random_matrix(d, cols, rng);
    DenseMatrix dy = random_matrix(d, cols, rng);

    for (NormKind kind : {NormKind::Batch, NormKind::Layer, NormKind::Instance,
                          NormKind::Graph}) {
        CAPTURE(to_string(kind));
        NormSpec spec = NormSpec::make(kind, d);
        if (kind == NormKind::Graph)
            for (std::size_t j = 0; j < d; ++j) spec.alpha[j] = 0.7 + 0.1 * j;
        for (std::size_t j = 0; j < d; ++j) {
            spec.gamma[j] = 1.0 + 0.2 * j;
            spec.beta[j] = 0.1 * j;
        }

        auto loss_of = [&](const DenseMatrix& x, const NormSpec& sp) {
            BatchNormState st = BatchNormState::make(d);
            DenseMatrix out = normalize(x, offsets, sp, &st, NormMode::Train);
            double l = 0.0;
            for (std::size_t i = 0; i < out.data().size(); ++i)
                l += out.data()[i] * dy.data()[i];
            return l;
        };

        BatchNormState st = BatchNormState::make(d);
        NormCache cache;
        normalize(h, offsets, spec, &st, NormMode::Train, &cache);
        NormGrads g = normalize_backward(dy, cache, spec);

        const double step = 1e-6;
        for (std::size_t i = 0; i < h.data().size(); ++i) {
            DenseMatrix hp = h, hm = h;
            hp.data()[i] += step;
            hm.data()[i] -= step;
            double fd = (loss_of(hp, spec) - loss_of(hm, spec)) / (2.0 * step);
            CHECK(g.dx.data()[i] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
        for (std::size_t j = 0; j < d; ++j) {
            NormSpec sp = spec, sm = spec;
            sp.gamma[j] += step;
            sm.gamma[j] -= step;
            double fd = (loss_of(h, sp) - loss_of(h, sm)) / (2.0 * step);
            CHECK(g.dgamma[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            sp = spec;
            sm = spec;
            sp.beta[j] += step;
            sm.beta[j] -= step;
            fd = (loss_of(h, sp) - loss_of(h, sm)) / (2.0 * step);
            CHECK(g.dbeta[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            if (kind == NormKind::Graph) {
                sp = spec;
                sm = spec;
                sp.alpha[j] += step;
                sm.alpha[j] -= step;
                fd = (loss_of(h, sp) - loss_of(h, sm)) / (2.0 * step);
                CHECK(g.dalpha[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
}

TEST_CASE("norm kind string round trip") {
    for (NormKind k : {NormKind::None, NormKind::Batch, NormKind::Layer,
                       NormKind::Instance, NormKind::Graph})
        CHECK(norm_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_WITH_AS(norm_kind_from_string("bogus"), doctest::Contains("allowed"),
                         std::invalid_argument);
}
