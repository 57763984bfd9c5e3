#include <doctest.h>

#include <algorithm>
#include <mutex>
#include <random>
#include <set>

#include "pstrat/errors.hpp"
#include "pstrat/resampling.hpp"

using namespace pstrat;

namespace {

const TrialDataset& reference() {
    static const TrialDataset d = load_dataset(std::string(PSTRAT_FIXTURES) + "/reference_trial.csv");
    return d;
}

const std::vector<double> kGammas{0.0, 0.64, 1.665};

bool same(const std::vector<BoundCI>& a, const std::vector<BoundCI>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].lower_ci != b[i].lower_ci || a[i].upper_ci != b[i].upper_ci || a[i].point_lower != b[i].point_lower ||
            a[i].point_upper != b[i].point_upper || a[i].n_failed != b[i].n_failed) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("percentile with linear interpolation") {
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(percentile(v, 0.5) == 2.5);
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 1.0) == 4.0);
    CHECK(percentile(v, 0.25) == doctest::Approx(1.75));
    const std::vector<double> one{7};
    CHECK(percentile(one, 0.3) == 7.0);
    CHECK_THROWS_AS(percentile(std::vector<double>{}, 0.5), ValidationError);
    CHECK_THROWS_AS(percentile(v, 1.5), ValidationError);
}

TEST_CASE("percentile matches a sort-and-index oracle") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 10.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<double> v(1 + rep % 37);
        for (auto& x : v) x = g(rng);
        std::sort(v.begin(), v.end());
        const double q = u(rng);
        // position (n-1) q between neighbours
        const double pos = q * static_cast<double>(v.size() - 1);
        const std::size_t k = static_cast<std::size_t>(pos);
        const double expected = k + 1 < v.size() ? v[k] * (1 - (pos - k)) + v[k + 1] * (pos - k) : v[k];
        CHECK(std::abs(percentile(v, q) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("substream seeds are distinct and stable") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(substream_seed(42, i));
    CHECK(seen.size() == 10000);
    CHECK(substream_seed(42, 7) == substream_seed(42, 7));
    CHECK(substream_seed(42, 7) != substream_seed(43, 7));
    // SplitMix64 reference output for input 0 (state incremented once)
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("resampling with replacement keeps the arm size") {
    Rng rng(1);
    std::vector<std::size_t> out;
    for (std::size_t n : {1u, 2u, 57u, 58u}) {
        resample_with_replacement(n, rng, out);
        CHECK(out.size() == n);
        CHECK(*std::max_element(out.begin(), out.end()) < n);
    }
}

TEST_CASE("bootstrap resamples within each assignment arm") {
    std::vector<std::size_t> sizes;
    std::mutex m;
    const Resampler spy = [&](std::size_t n, Rng& rng, std::vector<std::size_t>& out) {
        {
            std::lock_guard lock(m);
            sizes.push_back(n);
        }
        resample_with_replacement(n, rng, out);
    };
    BootstrapConfig c;
    c.replications = 100;
    c.threads = 1;
    bootstrap_bounds(reference(), kGammas, c, spy);
    REQUIRE(sizes.size() == 200);
    for (std::size_t i = 0; i < sizes.size(); i += 2) {
        CHECK(sizes[i] == 57);
        CHECK(sizes[i + 1] == 58);
    }
}

TEST_CASE("bootstrap is deterministic and independent of the thread count") {
    BootstrapConfig c;
    c.replications = 500;
    c.seed = 17;
    c.threads = 1;
    const auto a = bootstrap_bounds(reference(), kGammas, c);
    const auto b = bootstrap_bounds(reference(), kGammas, c);
    c.threads = 4;
    const auto t4 = bootstrap_bounds(reference(), kGammas, c);
    c.threads = 3;
    const auto t3 = bootstrap_bounds(reference(), kGammas, c);
    CHECK(same(a, b));
    CHECK(same(a, t4));
    CHECK(same(a, t3));
    c.seed = 18;
    CHECK_FALSE(same(a, bootstrap_bounds(reference(), kGammas, c)));

    REQUIRE(a.size() == 6);
    CHECK(a[0].effect == Effect::Adoption);
    CHECK(a[1].effect == Effect::Effectiveness);
    for (const auto& ci : a) CHECK(ci.lower_ci <= ci.upper_ci);
}

TEST_CASE("identity resampler on zero-variance cells collapses the interval onto the bounds") {
    std::vector<StrataUnit> z0, z1;
    for (int i = 0; i < 40; ++i) z0.push_back({i < 10, i < 10 ? 2.0 : 2.3});
    for (int i = 0; i < 40; ++i) z1.push_back({i < 20, i < 20 ? 3.0 : 2.4});
    BootstrapConfig c;
    c.replications = 200;
    const std::vector<double> gammas{0.0, 0.5, 1.0, std::numeric_limits<double>::infinity()};
    const auto cis = bootstrap_bounds(z0, z1, Support{}, gammas, c, resample_identity);
    REQUIRE(cis.size() == 8);
    for (const auto& ci : cis) {
        CHECK(ci.lower_ci == ci.point_lower);
        CHECK(ci.upper_ci == ci.point_upper);
        CHECK(ci.n_failed == 0);
    }
}

TEST_CASE("wider level never narrows the interval") {
    BootstrapConfig c;
    c.replications = 1000;
    c.seed = 5;
    c.level = 0.80;
    const auto narrow = bootstrap_bounds(reference(), kGammas, c);
    c.level = 0.95;
    const auto wide = bootstrap_bounds(reference(), kGammas, c);
    for (std::size_t i = 0; i < narrow.size(); ++i) {
        CHECK(wide[i].lower_ci <= narrow[i].lower_ci);
        CHECK(wide[i].upper_ci >= narrow[i].upper_ci);
    }
}

TEST_CASE("interval endpoints stabilise with many replications") {
    BootstrapConfig c;
    c.replications = 20000;
    c.seed = 1;
    const auto a = bootstrap_bounds(reference(), kGammas, c);
    c.seed = 2;
    const auto b = bootstrap_bounds(reference(), kGammas, c);
    // tail quantiles of the adoption lower end are noisy (division by a small induced share),
    // so the tolerance scales with the interval width
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tol = 0.02 * (a[i].upper_ci - a[i].lower_ci);
        CHECK(std::abs(a[i].lower_ci - b[i].lower_ci) < tol);
        CHECK(std::abs(a[i].upper_ci - b[i].upper_ci) < tol);
    }
}

TEST_CASE("unstable bootstrap is rejected") {
    // Adoption barely higher under training: most resamples lose the induced stratum.
    std::vector<StrataUnit> z0, z1;
    for (int i = 0; i < 30; ++i) z0.push_back({i < 15, 2.0 + 0.1 * (i % 5)});
    for (int i = 0; i < 30; ++i) z1.push_back({i < 16, 2.0 + 0.1 * (i % 4)});
    BootstrapConfig c;
    c.replications = 400;
    CHECK_THROWS_WITH_AS(bootstrap_bounds(z0, z1, Support{}, kGammas, c),
                         "bootstrap unstable: monotonicity frequently violated in resamples", AssumptionError);
    c.max_failed_share = 1.0;
    const auto cis = bootstrap_bounds(z0, z1, Support{}, kGammas, c);
    CHECK(cis.front().n_monotonicity_failed > 80);
    CHECK(cis.front().n_failed >= cis.front().n_monotonicity_failed);
}

TEST_CASE("support violations are dropped without tripping the stability check") {
    // induced baseline near y_min: many resamples deconvolve below the support
    BootstrapConfig c;
    c.replications = 2000;
    const auto cis = bootstrap_bounds(reference(), kGammas, c);
    const auto& f = cis.front();
    CHECK(f.n_monotonicity_failed < 400);
    CHECK(f.n_failed > f.n_monotonicity_failed);
    MESSAGE("reference fixture: " << f.n_failed << " of 2000 replicates dropped, " << f.n_monotonicity_failed
                                  << " without induced users");
}

TEST_CASE("bootstrap configuration is validated") {
    BootstrapConfig c;
    c.replications = 99;
    CHECK_THROWS_AS(bootstrap_bounds(reference(), kGammas, c), ValidationError);
    c.replications = 100;
    c.level = 1.0;
    CHECK_THROWS_AS(bootstrap_bounds(reference(), kGammas, c), ValidationError);
    c.level = 0.9;
    CHECK_THROWS_AS(bootstrap_bounds(reference(), std::vector<double>{-1.0}, c), ValidationError);
}
