#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "thinlab/congruence_transfer.hpp"
#include "thinlab/shift.hpp"
#include "thinlab/transfer.hpp"

using namespace thinlab;

namespace {

SubshiftSpec schottky_spec() { return SubshiftSpec(testing::schottky()); }

}  // namespace

TEST_CASE("subshift spec: basepoint selection and validation") {
    const SubshiftSpec spec = schottky_spec();
    CHECK(spec.basepoint.x == 0);
    CHECK(spec.basepoint.y == 1);
    CHECK(spec.system.alphabet_size() == 4);

    // a generator fixing i forces the perturbed basepoint 1/2 + i
    const GeneratorSystem with_rotation({Mat2Z(0, 1, -1, 0), Mat2Z(1, 2, 0, 1)});
    const SubshiftSpec perturbed{with_rotation};
    CHECK(perturbed.basepoint.x == mpq_class(1, 2));

    // a single generator pair is not an aperiodic shift
    CHECK_THROWS_AS(SubshiftSpec(GeneratorSystem({Mat2Z(1, 2, 0, 1)})), std::invalid_argument);
}

TEST_CASE("tau of a single letter is the displacement of the basepoint") {
    const SubshiftSpec sanov{testing::sanov()};
    // L = [[1,2],[0,1]] moves i to 2 + i: u = 1, cosh tau = 3
    CHECK(tau_eval(sanov, {0}) == doctest::Approx(std::acosh(3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(tau_eval(sanov, {}), std::invalid_argument);
    CHECK_THROWS_AS(tau_eval(sanov, {0, 1}), std::invalid_argument);
}

TEST_CASE("Birkhoff sums telescope exactly") {
    const SubshiftSpec spec = schottky_spec();
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const Word w = testing::random_admissible_word(spec.system, 5, rng);
        double sum = 0.0;
        for (std::size_t m = 1; m <= w.size(); ++m)
            sum += tau_eval(spec, Word(w.begin(), w.begin() + m));
        CHECK(sum == doctest::Approx(birkhoff_eval(spec, w)).epsilon(1e-10));
    }
}

TEST_CASE("tau depends weakly on the deep tail (empirical Holder decay)") {
    const SubshiftSpec spec = schottky_spec();
    std::mt19937_64 rng(19);
    // vary the innermost letter behind a shared outer block of length n: the
    // difference of tau values must decay geometrically in n
    std::vector<double> worst_at;
    for (int n = 1; n <= 7; n += 2) {
        double worst = 0.0;
        for (int trial = 0; trial < 60; ++trial) {
            const Word shared = testing::random_admissible_word(spec.system, n, rng);
            std::vector<double> taus;
            for (Letter j = 0; j < spec.system.alphabet_size(); ++j) {
                if (!spec.system.transition(j, shared.front())) continue;
                Word w{j};
                w.insert(w.end(), shared.begin(), shared.end());
                taus.push_back(tau_eval(spec, w));
            }
            for (std::size_t i = 0; i < taus.size(); ++i)
                for (std::size_t k = i + 1; k < taus.size(); ++k)
                    worst = std::max(worst, std::fabs(taus[i] - taus[k]));
        }
        worst_at.push_back(worst);
    }
    for (std::size_t i = 1; i < worst_at.size(); ++i) CHECK(worst_at[i] < worst_at[i - 1]);
    CHECK(worst_at.back() < 1e-4);   // geometric decay has set in by block length 7
}

TEST_CASE("cylinder grids: counts, transitions, refinement stability") {
    const SubshiftSpec spec = schottky_spec();
    const CylinderGrid g4(spec, 4);
    CHECK(g4.size() == 4 * 3 * 3 * 3);
    CHECK(g4.degree() == 3);

    // successors drop the deepest letter and append an admissible outer letter
    for (std::size_t v = 0; v < g4.size(); ++v) {
        for (int t = 0; t < g4.degree(); ++t) {
            const Word& from = g4.word(v);
            const Word& to = g4.word(g4.successor(v, t));
            CHECK(Word(from.begin() + 1, from.end()) == Word(to.begin(), to.end() - 1));
            CHECK(to.back() == g4.successor_letter(v, t));
        }
    }

    // tau values are refinement-stable: the depth-5 refinements of a depth-4
    // cylinder stay within a geometric envelope of the parent value
    const CylinderGrid g5(spec, 5);
    double worst = 0.0;
    for (std::size_t v = 0; v < g4.size(); ++v) {
        for (const Word& r : g4.refinements(v)) {
            const double drift = std::fabs(g5.tau(g5.index_of(r)) - g4.tau(v));
            worst = std::max(worst, drift);
        }
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("eventual positivity: Schottky succeeds early, Sanov degenerates") {
    const EventualPositivityResult ok = eventual_positivity_check(schottky_spec(), 4);
    REQUIRE(ok.succeeded());
    CHECK(*ok.m <= 4);
    CHECK(ok.min_birkhoff > 0.5);

    // parabolic letters: the minimum over L^m cylinders decays toward zero;
    // the check reports the degeneracy honestly
    const SubshiftSpec sanov{testing::sanov()};
    const EventualPositivityResult weak = eventual_positivity_check(sanov, 3);
    if (weak.succeeded()) CHECK(weak.min_birkhoff < 0.2);

    const EventualPositivityResult none = eventual_positivity_check(schottky_spec(), 0);
    CHECK_FALSE(none.succeeded());
}

TEST_CASE("transfer operator at s = 0 counts preimages") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 4);
    const TransferOperator op(grid, 0.0);

    // every row of the s = 0 matrix sums to 2k - 1 = 3
    const Eigen::SparseMatrix<double> m = op.matrix();
    Eigen::VectorXd row_sums = m * Eigen::VectorXd::Ones(m.cols());
    CHECK((row_sums.array() - 3.0).abs().maxCoeff() < 1e-14);

    const PerronTriple triple = leading_eigentriple(op);
    CHECK(triple.lambda == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(triple.h.minCoeff() > 0.0);
    CHECK(triple.nu.minCoeff() >= 0.0);
    CHECK(triple.nu.dot(triple.h) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized iterates converge geometrically to the Perron projection") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 4);
    const TransferOperator op(grid, 0.31);
    const PerronTriple triple = leading_eigentriple(op, 1e-14);

    // || lambda^{-n} L^n g - (nu . g) h ||_inf shrinks by a stable factor < 1
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Eigen::VectorXd g(static_cast<Eigen::Index>(grid->size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = unif(rng);
    const Eigen::VectorXd limit = triple.nu.dot(g) * triple.h;

    double prev = (g - limit).lpNorm<Eigen::Infinity>();
    double worst_ratio = 0.0;
    for (int n = 1; n <= 16; ++n) {
        g = op.apply(g) / triple.lambda;
        const double err = (g - limit).lpNorm<Eigen::Infinity>();
        if (n > 2) worst_ratio = std::max(worst_ratio, err / prev);
        prev = err;
    }
    CHECK(worst_ratio < 0.9);
    CHECK(prev < 1e-4);
}

TEST_CASE("leading eigenvalue decreases strictly and log-convexly in s") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 5);
    std::vector<double> logs;
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0})
        logs.push_back(std::log(leading_eigenvalue(TransferOperator(grid, s))));
    for (std::size_t i = 1; i < logs.size(); ++i) CHECK(logs[i] < logs[i - 1]);
    for (std::size_t i = 2; i < logs.size(); ++i)
        CHECK(logs[i] - 2 * logs[i - 1] + logs[i - 2] >= -1e-9);
}

TEST_CASE("parabolic letters leave a visible degeneracy signature") {
    // the periodic-tail model does not settle for the parabolic fixture:
    // the depth drift stays large and the contraction is weak, in contrast
    // to the ping-pong pair
    const SubshiftSpec sanov{testing::sanov()};
    const DeltaEstimate est = estimate_delta(sanov, {5, 6, 7});
    CHECK(est.last_drift() > 0.01);
    const HolderFit fit = fit_holder_constants(sanov, 2, 5);
    CHECK(fit.rho > 0.5);
}

TEST_CASE("the Holder constants of tau fit a geometric decay") {
    const SubshiftSpec spec = schottky_spec();
    const HolderFit fit = fit_holder_constants(spec, 2, 6);
    REQUIRE(fit.variations.size() == 5);
    for (std::size_t i = 1; i < fit.variations.size(); ++i)
        CHECK(fit.variations[i].second < fit.variations[i - 1].second);
    CHECK(fit.rho > 0.0);
    CHECK(fit.rho < 0.3);      // strong contraction for the ping-pong pair
    CHECK(fit.tau_norm > 0.0);
}

TEST_CASE("pressure root and delta estimation agree across depths") {
    const SubshiftSpec spec = schottky_spec();
    const DeltaEstimate est = estimate_delta(spec, {3, 4, 5, 6});
    CHECK(est.rows.size() == 4);
    CHECK(est.delta() > 0.0);
    CHECK(est.delta() < 1.0);
    CHECK(est.last_drift() <= 2e-3);

    // depth drift decays geometrically until it hits the bisection grid
    for (std::size_t i = 2; i < est.rows.size(); ++i)
        CHECK(est.rows[i].drift < std::max(est.rows[i - 1].drift, 2e-6) + 1e-12);

    // bisection contract: lambda at the root is 1 within tolerance
    auto grid = std::make_shared<const CylinderGrid>(spec, 6);
    const double lambda_at_root = leading_eigenvalue(TransferOperator(grid, est.delta()));
    CHECK(std::fabs(lambda_at_root - 1.0) < 1e-5);

    const PressureCurve curve = pressure_curve(spec, 5, {0.0, 0.2, 0.4, 0.6});
    for (std::size_t i = 1; i < curve.samples.size(); ++i)
        CHECK(curve.samples[i].second < curve.samples[i - 1].second);
    CHECK(curve.root == doctest::Approx(est.rows[1].delta_hat).epsilon(1e-4));
}

TEST_CASE("Gibbs ratios: bounded and stable at delta, degrading away from it") {
    const SubshiftSpec spec = schottky_spec();
    const DeltaEstimate est = estimate_delta(spec, {5});
    const double delta = est.delta();

    // depth 1: finite positive ratios
    const CylinderGrid g1(spec, 1);
    const GibbsRatioReport r1 = gibbs_ratio_check(g1, delta, delta);
    CHECK(r1.min_ratio > 0.0);
    CHECK(std::isfinite(r1.max_ratio));

    const CylinderGrid g5(spec, 5);
    const CylinderGrid g7(spec, 7);
    const GibbsRatioReport r5 = gibbs_ratio_check(g5, delta, delta);
    const GibbsRatioReport r7 = gibbs_ratio_check(g7, delta, delta);
    CHECK(r5.min_ratio > 0.0);
    CHECK(std::isfinite(r5.spread()));
    // stable within a factor 2 across two refinement steps
    CHECK(r7.spread() / r5.spread() < 2.0);
    CHECK(r5.spread() / r7.spread() < 2.0);

    // negative control: evaluating against the wrong parameter spreads with depth
    const GibbsRatioReport w5 = gibbs_ratio_check(g5, delta, delta + 0.3);
    const GibbsRatioReport w7 = gibbs_ratio_check(g7, delta, delta + 0.3);
    CHECK(w7.spread() > 2.0 * w5.spread());
}

TEST_CASE("congruence transfer: trivial modulus reduces to the scalar operator") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 4);
    auto group = std::make_shared<const ResidueGroup>(spec.system, SquareFreeModulus::make(1));
    const CongruenceTransferOperator congruence(grid, group, 0.31);
    const TransferOperator scalar(grid, 0.31);

    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd phi(static_cast<Eigen::Index>(grid->size()));
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] = unif(rng);

    // |G| = 1: identical layout, identical arithmetic
    const Eigen::VectorXd via_congruence = congruence.apply(phi);
    const Eigen::VectorXd via_scalar = scalar.apply(phi);
    CHECK((via_congruence - via_scalar).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("congruence transfer: the g-constant sector is the scalar operator bit for bit") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 3);
    auto group = std::make_shared<const ResidueGroup>(spec.system, SquareFreeModulus::make(3));
    REQUIRE(group->is_full());
    const CongruenceTransferOperator congruence(grid, group, 0.31);
    const TransferOperator scalar(grid, 0.31);

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd phi(static_cast<Eigen::Index>(grid->size()));
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] = unif(rng);

    const Eigen::VectorXd lifted = congruence.lift_constant(phi);
    const Eigen::VectorXd applied = congruence.apply(lifted);
    const Eigen::VectorXd expected = congruence.lift_constant(scalar.apply(phi));
    CHECK((applied - expected).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("iterated congruence weights grow like lambda^n") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 4);
    auto group = std::make_shared<const ResidueGroup>(spec.system, SquareFreeModulus::make(3));
    const double s = 0.31;
    const CongruenceTransferOperator op(grid, group, s);
    const double lambda = leading_eigenvalue(TransferOperator(grid, s));

    Eigen::VectorXd f = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.dim()));
    double prev_ratio = 0.0;
    for (int n = 1; n <= 10; ++n) {
        f = op.apply(f);
        const double ratio = f.sum() / std::pow(lambda, n) / static_cast<double>(op.dim());
        if (n > 3) {
            CHECK(ratio / prev_ratio > 0.8);
            CHECK(ratio / prev_ratio < 1.25);
        }
        prev_ratio = ratio;
    }
}

TEST_CASE("the group-variable Walsh sector is invariant under the operator") {
    // slices of M f are left translations of slices of f, and the top Walsh
    // component is translation invariant; a wrong action orientation or a
    // broken projection would show up here
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 3);
    auto group = std::make_shared<const ResidueGroup>(spec.system, SquareFreeModulus::make(3));
    const CongruenceTransferOperator op(grid, group, 0.31);
    const WalshDecomposition walsh(spec.system, SquareFreeModulus::make(3));
    const std::size_t G = group->size();

    auto project = [&](const Eigen::VectorXd& f) {
        Eigen::VectorXd out(f.size());
        Eigen::VectorXd slice(static_cast<Eigen::Index>(G));
        for (std::size_t v = 0; v < grid->size(); ++v) {
            for (std::size_t g = 0; g < G; ++g)
                slice[static_cast<Eigen::Index>(g)] = f[static_cast<Eigen::Index>(v * G + g)];
            const Eigen::VectorXd proj = walsh.top_component(slice);
            for (std::size_t g = 0; g < G; ++g)
                out[static_cast<Eigen::Index>(v * G + g)] = proj[static_cast<Eigen::Index>(g)];
        }
        return out;
    };

    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd f(static_cast<Eigen::Index>(op.dim()));
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = unif(rng);

    const Eigen::VectorXd in_sector = project(f);
    const Eigen::VectorXd image = op.apply(in_sector);
    const Eigen::VectorXd reprojected = project(image);
    CHECK((image - reprojected).lpNorm<Eigen::Infinity>() <
          1e-12 * std::max(1.0, image.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("congruence operator dimension budget") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 3);
    auto group = std::make_shared<const ResidueGroup>(spec.system, SquareFreeModulus::make(3));
    CHECK_THROWS_AS(CongruenceTransferOperator(grid, group, 0.31, /*dim_budget=*/100),
                    std::invalid_argument);
}

TEST_CASE("Arnoldi sector radius agrees with a dense eigensolve") {
    const SubshiftSpec spec = schottky_spec();
    auto grid = std::make_shared<const CylinderGrid>(spec, 3);
    auto group = std::make_shared<const ResidueGroup>(spec.system, SquareFreeModulus::make(3));
    const double s = 0.31;
    const CongruenceTransferOperator op(grid, group, s);
    const WalshDecomposition walsh(spec.system, SquareFreeModulus::make(3));
    const std::size_t G = group->size();
    const auto n = static_cast<Eigen::Index>(op.dim());

    auto project = [&](const Eigen::VectorXd& f) {
        Eigen::VectorXd out(f.size());
        Eigen::VectorXd slice(static_cast<Eigen::Index>(G));
        for (std::size_t v = 0; v < grid->size(); ++v) {
            for (std::size_t g = 0; g < G; ++g)
                slice[static_cast<Eigen::Index>(g)] = f[static_cast<Eigen::Index>(v * G + g)];
            const Eigen::VectorXd proj = walsh.top_component(slice);
            for (std::size_t g = 0; g < G; ++g)
                out[static_cast<Eigen::Index>(v * G + g)] = proj[static_cast<Eigen::Index>(g)];
        }
        return out;
    };
    auto sector_apply = [&](const Eigen::VectorXd& f) { return project(op.apply(f)); };

    // dense matrix of the projected operator, column by column
    Eigen::MatrixXd dense(n, n);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        unit[c] = 1.0;
        dense.col(c) = sector_apply(project(unit));
        unit[c] = 0.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
    double dense_radius = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        dense_radius = std::max(dense_radius, std::abs(es.eigenvalues()[i]));

    const double arnoldi = arnoldi_spectral_radius(sector_apply, n);
    CHECK(arnoldi == doctest::Approx(dense_radius).epsilon(1e-8));
}

TEST_CASE("congruence sector gap at q = 3") {
    const SubshiftSpec spec = schottky_spec();
    const SectorGapReport rep = congruence_sector_gap(spec, 4, 3, 0.3102);
    CHECK(rep.ratio < 1.0);
    CHECK(rep.ratio > 0.0);
    CHECK(rep.dim == 108 * 24);

    const SectorGapReport trivial = congruence_sector_gap(spec, 4, 1, 0.3102);
    CHECK(trivial.ratio == 1.0);

    // proper closure is rejected
    CHECK_THROWS_AS(congruence_sector_gap(spec, 3, 5, 0.3102), std::invalid_argument);
}

TEST_CASE("sector gap ratio is stable under conjugation of the generators") {
    const SubshiftSpec base = schottky_spec();
    const Mat2Z h(1, 1, 0, 1);
    std::vector<Mat2Z> conj;
    for (std::size_t i = 0; i < 2; ++i) {
        const Mat2Z& g = (i == 0) ? Mat2Z(3, 1, 2, 1) : Mat2Z(11, -39, 2, -7);
        conj.push_back(h * g * inverse(h));
    }
    const SubshiftSpec moved{GeneratorSystem(conj)};
    const SectorGapReport a = congruence_sector_gap(base, 4, 3, 0.3102);
    const SectorGapReport b = congruence_sector_gap(moved, 4, 3, 0.3102);
    CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(0.05));
}
