#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace affq;

namespace {

Body<3> body3(const BodySpec& s) { return std::get<Body<3>>(make_body(s)); }
Body<2> body2(const BodySpec& s) { return std::get<Body<2>>(make_body(s)); }

const FieldTable<3>& ellipsoid_table() {
    static const FieldTable<3> t = sample_field<3>(body3(zoo_specs()[0]), 16, 4.0, 32);
    return t;
}

// Table with prescribed (iso, T) pairs and unit weights.
FieldTable<2> synthetic(const std::vector<std::pair<double, int>>& rows) {
    FieldTable<2> t;
    t.ds = 1.0;
    for (const auto& [iso, T] : rows) {
        FieldRow<2> r;
        r.sphere_weight = 1.0;
        r.iso = iso;
        r.T = T;
        t.rows.push_back(r);
    }
    return t;
}

}  // namespace

TEST(SampleField, RowInvariants) {
    const auto& t = ellipsoid_table();
    EXPECT_EQ(t.failed_rows, 0);
    EXPECT_EQ(t.rows.size(), 16u * 32u * 32u);
    for (const auto& r : t.rows) {
        EXPECT_NEAR(r.t, std::sinh(r.s), 1e-14 * std::max(1.0, std::abs(r.t)));
        EXPECT_GT(r.iso, 0.0);
        EXPECT_LE(r.iso, 1.0);
        EXPECT_TRUE(satisfies_euler_identity<3>(r.counts));
        EXPECT_EQ(r.T % 2, 0);
        EXPECT_GE(r.T, 4);
    }
}

TEST(SampleField, WeightsIntegrateTheWindowExactly) {
    const auto& t = ellipsoid_table();
    double sum = 0.0;
    for (const auto& r : t.rows) sum += t.weight(r);
    EXPECT_NEAR(sum, 2.0 * t.s_max * 4.0 * kPi, 1e-12 * sum);
    EXPECT_NEAR(t.ds * t.s_steps, 2.0 * t.s_max, 1e-12);
}

TEST(SampleField, SpotRowsAgreeWithBruteForceCensus) {
    const auto& t = ellipsoid_table();
    const auto b = body3(zoo_specs()[0]);
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> pick(0, t.rows.size() - 1);
    for (int k = 0; k < 10; ++k) {
        const auto& r = t.rows[pick(rng)];
        const auto bt = apply_affinity<3>(b, r.v, std::abs(r.t));
        const auto d = oracle::brute_counts(bt, 512);
        EXPECT_EQ((EquilibriumCounts{d.S, d.U, d.N, d.S + d.U + d.N}), r.counts) << "t = " << r.t;
    }
}

TEST(SampleField, PlanarCountsAreEven) {
    const auto t = sample_field<2>(body2(zoo_specs()[3]), 32, 3.0, 32);
    for (const auto& r : t.rows) {
        EXPECT_EQ(r.counts.S, r.counts.U);
        EXPECT_EQ(r.counts.N, 0);
    }
}

TEST(SampleField, RejectsBadWindows) {
    const auto b = body2(zoo_specs()[1]);
    EXPECT_THROW(sample_field<2>(b, 16, 2.0, 32), Error);
    EXPECT_THROW(sample_field<2>(b, 16, 4.0, 33), Error);
    EXPECT_THROW(sample_field<2>(b, 16, 4.0, 16), Error);
}

TEST(SampleField, DegenerateBodyRaisesExcessiveDegeneracy) {
    // Every stretch of the ball is a spheroid with a circle of equilibria.
    try {
        sample_field<3>(body3(ellipsoid_spec({1, 1, 1})), 16, 3.0, 32);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ExcessiveDegeneracy);
    }
}

TEST(RestrictWindow, MatchesDirectSampling) {
    const auto b = body2(zoo_specs()[2]);
    const auto wide = sample_field<2>(b, 32, 6.0, 64);
    const auto direct = sample_field<2>(b, 32, 3.0, 32);
    const auto cut = restrict_window<2>(wide, 3.0);
    ASSERT_EQ(cut.rows.size(), direct.rows.size());
    EXPECT_EQ(cut.s_steps, 32);
    auto key = [](const FieldRow<2>& r) { return std::make_tuple(r.v, r.s); };
    std::vector<FieldRow<2>> a = cut.rows, c = direct.rows;
    auto less = [&](const FieldRow<2>& x, const FieldRow<2>& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), less);
    std::sort(c.begin(), c.end(), less);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].s, c[i].s);
        EXPECT_EQ(a[i].iso, c[i].iso);
        EXPECT_EQ(a[i].T, c[i].T);
    }
}

TEST(BinAverages, SingleBinIsGlobalMean) {
    const auto& t = ellipsoid_table();
    const auto b = bin_averages<3>(t, 1);
    double num = 0.0, den = 0.0;
    for (const auto& r : t.rows) {
        num += t.weight(r) * r.T;
        den += t.weight(r);
    }
    ASSERT_TRUE(b.t_values[0].has_value());
    EXPECT_NEAR(*b.t_values[0], num / den, 1e-12);
    EXPECT_TRUE(b.monotone);
}

TEST(BinAverages, MeansLieWithinContributingRange) {
    const auto& t = ellipsoid_table();
    for (int k = 1; k <= 8; ++k) {
        const auto b = bin_averages<3>(t, k);
        for (int i = 0; i < k; ++i) {
            if (!b.t_values[i]) continue;
            EXPECT_GE(*b.t_values[i], b.min_T[i] - 1e-12);
            EXPECT_LE(*b.t_values[i], b.max_T[i] + 1e-12);
        }
    }
}

TEST(BinAverages, EmptyBinsAreUndefinedAndSkipped) {
    const auto t = synthetic({{0.9, 4}, {0.95, 6}, {0.2, 8}});
    const auto b = bin_averages<2>(t, 4);
    EXPECT_TRUE(b.t_values[0].has_value());
    EXPECT_FALSE(b.t_values[1].has_value());
    EXPECT_FALSE(b.t_values[2].has_value());
    EXPECT_DOUBLE_EQ(*b.t_values[3], 5.0);
    EXPECT_FALSE(b.monotone);
    EXPECT_TRUE(defined_nondecreasing({std::nullopt, 3.0, std::nullopt, 3.0, 4.0}));
    EXPECT_EQ(bin_of(1.0, 4), 3);
    EXPECT_EQ(bin_of(0.0, 4), 0);
}

TEST(CriticalNumber, MonotoneSyntheticTable) {
    std::vector<std::pair<double, int>> rows;
    for (int i = 1; i <= 200; ++i) {
        const double iso = i / 200.0;
        rows.push_back({iso, static_cast<int>(std::lround(4 + 4 * iso))});
    }
    EXPECT_EQ(critical_number<2>(synthetic(rows), 8).k_star, 8);
    EXPECT_THROW(critical_number<2>(synthetic(rows), 1), Error);
}

TEST(CriticalNumber, EllipsoidSatisfiesLowerBound) {
    const auto cn = critical_number<3>(ellipsoid_table(), 8);
    EXPECT_GE(cn.k_star, 2);
    const auto& b2 = cn.per_k[1];
    ASSERT_TRUE(b2.t_values[0] && b2.t_values[1]);
    EXPECT_LE(*b2.t_values[0], *b2.t_values[1]);
}

TEST(CriticalNumber, LowBinTrendsToPlanarLimit) {
    // For a planar body with six equilibria at t = 1, the lowest bin is
    // dominated by extreme stretches with four.
    const auto b = body2(zoo_specs()[3]);
    double prev = 1e9;
    for (double s_max : {3.0, 6.0, 9.0}) {
        const auto t = sample_field<2>(b, 32, s_max, static_cast<int>(std::lround(s_max * 8)) * 2);
        const auto bins = bin_averages<2>(t, 4);
        const auto first = std::find_if(bins.t_values.begin(), bins.t_values.end(), [](auto& x) { return x.has_value(); });
        ASSERT_NE(first, bins.t_values.end());
        const double gap = std::abs(**first - 4.0);
        EXPECT_LE(gap, prev + 1e-12) << s_max;
        prev = gap;
    }
}

TEST(ConjectureReport, PerBodyEntriesAndDeterminism) {
    std::vector<NamedBody> bodies;
    for (int idx : {1, 2}) bodies.push_back({zoo_specs()[idx].label, make_body(zoo_specs()[idx])});
    bodies.push_back({"ball", make_body(ellipsoid_spec({1, 1, 1}))});
    ConjectureConfig cfg;
    cfg.field.sphere_res = 32;
    cfg.field.s_max = 3.0;
    const auto r1 = conjecture_report(bodies, cfg);
    const auto r2 = conjecture_report(bodies, cfg);
    EXPECT_EQ(r1.document.dump(), r2.document.dump());
    EXPECT_EQ(r1.bins_csv, r2.bins_csv);
    const auto& e = r1.document["bodies"];
    ASSERT_EQ(e.size(), 3u);
    EXPECT_GE(e[0]["k_star"].get<int>(), 1);
    EXPECT_EQ(e[0]["tables"].size(), 3u);
    EXPECT_TRUE(e[0].contains("truncation_sensitivity"));
    // The failing body is reported, not fatal.
    EXPECT_TRUE(e[2].contains("error"));
    EXPECT_TRUE(e[2]["k_star"].is_null());
    EXPECT_EQ(r1.bins_csv[0].second.substr(0, 17), "k,i,t_i,occupancy");
}
