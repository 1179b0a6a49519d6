#include <cmath>
#include <algorithm>
#include <map>
#include <numbers>
#include <random>
#include <utility>

#include <gtest/gtest.h>

#include "fusetrack/pillarizer.hpp"
#include "oracles.hpp"

namespace fusetrack {
namespace {

using oracle::random_points;

TEST(PillarizeTest, MatchesOracleBitwise) {
  const BevGrid grid;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    // Span slightly wider than the grid so out-of-range points are exercised.
    const auto pts = random_points(rng, 1 + static_cast<int>(rng() % 3000), 55.0);
    const FeatureMap got = pillarize(pts, grid);
    ASSERT_EQ(got.channels(), kRadarChannels);
    ASSERT_EQ(got.height(), 128);
    ASSERT_EQ(got.width(), 128);
    EXPECT_EQ(got.data(), oracle::pillarize(pts, 51.2, 0.8, 128));
  }
}

TEST(PillarizeTest, DenseCellsMatchOracle) {
  // Many points per cell stress the summation order.
  const BevGrid grid(4.0, 0.8);
  std::mt19937_64 rng(12);
  const auto pts = random_points(rng, 5000, 4.0);
  EXPECT_EQ(pillarize(pts, grid).data(), oracle::pillarize(pts, 4.0, 0.8, 10));
}

TEST(PillarizeTest, EmptyInputGivesZeros) {
  const FeatureMap m = pillarize({}, BevGrid());
  for (float v : m.data()) EXPECT_EQ(v, 0.0f);
}

TEST(PillarizeTest, SinglePointInOriginCell) {
  RadarPoint p = RadarPoint::at({0.1, 0.2, 1.5});
  p.set_feature(radar_channel::kRcs, 7.0);
  const std::vector<RadarPoint> pts{p};
  const FeatureMap m = pillarize(pts, BevGrid());
  EXPECT_FLOAT_EQ(m.at(radar_channel::kX, 64, 64), 0.1f);
  EXPECT_FLOAT_EQ(m.at(radar_channel::kY, 64, 64), 0.2f);
  EXPECT_FLOAT_EQ(m.at(radar_channel::kZ, 64, 64), 1.5f);
  EXPECT_FLOAT_EQ(m.at(radar_channel::kRcs, 64, 64), 7.0f);
  EXPECT_EQ(m.at(radar_channel::kRcs, 64, 65), 0.0f);
}

// Property: position channels carry the centroid, so each non-empty cell's
// (x, y) mean lies inside that cell.
TEST(PillarizeTest, CentroidStaysInCell) {
  const BevGrid grid;
  std::mt19937_64 rng(13);
  const auto pts = random_points(rng, 4000, 51.2);
  const FeatureMap m = pillarize(pts, grid);
  std::map<std::pair<int, int>, int> occupied;
  for (const auto& p : pts) {
    if (auto c = grid.world_to_cell(p.position().head<2>())) ++occupied[{c->row, c->col}];
  }
  for (const auto& [rc, count] : occupied) {
    const Eigen::Vector2d center = grid.cell_center({rc.first, rc.second});
    const double half = grid.resolution_m() / 2 + 1e-5;
    EXPECT_LE(std::abs(m.at(0, rc.first, rc.second) - center.x()), half);
    EXPECT_LE(std::abs(m.at(1, rc.first, rc.second) - center.y()), half);
  }
}

// Property: for non-position channels, scaling features scales the mean.
TEST(PillarizeTest, NonPositionChannelsAreLinear) {
  const BevGrid grid;
  std::mt19937_64 rng(14);
  auto pts = random_points(rng, 2000, 51.2);
  const FeatureMap base = pillarize(pts, grid);
  for (auto& p : pts) {
    for (int c = 3; c < kRadarChannels; ++c) p.set_feature(c, 2.5 * p.feature(c));
  }
  const FeatureMap scaled = pillarize(pts, grid);
  for (int c = 3; c < kRadarChannels; ++c) {
    for (int r = 0; r < 128; ++r) {
      for (int k = 0; k < 128; ++k) {
        EXPECT_NEAR(scaled.at(c, r, k), 2.5f * base.at(c, r, k),
                    1e-5 * (1.0 + std::abs(scaled.at(c, r, k))));
      }
    }
  }
}

TEST(PillarizeTest, PermutationChangesOnlyRounding) {
  const BevGrid grid;
  std::mt19937_64 rng(15);
  auto pts = random_points(rng, 3000, 51.2);
  const FeatureMap a = pillarize(pts, grid);
  std::shuffle(pts.begin(), pts.end(), rng);
  const FeatureMap b = pillarize(pts, grid);
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    EXPECT_NEAR(a.data()[i], b.data()[i], 1e-5 * (1.0 + std::abs(a.data()[i])));
  }
}

TEST(RadarPointTest, RejectsNonFinite) {
  RadarFeatures f{};
  f[4] = std::nan("");
  EXPECT_THROW(RadarPoint{f}, std::invalid_argument);
  RadarPoint p;
  EXPECT_THROW(p.set_feature(18, 1.0), std::out_of_range);
  EXPECT_THROW(p.set_feature(3, INFINITY), std::invalid_argument);
}

TEST(AccumulateSweepsTest, KeepsNewestAndStampsOffsets) {
  std::vector<RadarSweep> sweeps;
  for (int i = 0; i < 7; ++i) {
    RadarSweep s;
    s.timestamp = 0.05 * i;
    s.points.push_back(RadarPoint::at({static_cast<double>(i), 0.0, 0.0}));
    sweeps.push_back(s);
  }
  const auto merged = accumulate_sweeps(sweeps, 0.3);
  ASSERT_EQ(merged.size(), 5u);
  EXPECT_DOUBLE_EQ(merged.front().position().x(), 2.0);
  EXPECT_NEAR(merged.front().feature(radar_channel::kTimeOffset), 0.2, 1e-12);
  EXPECT_NEAR(merged.back().feature(radar_channel::kTimeOffset), 0.0, 1e-12);

  EXPECT_EQ(accumulate_sweeps(sweeps, 0.3, 1).size(), 1u);
  EXPECT_THROW(accumulate_sweeps(sweeps, 0.3, 0), std::invalid_argument);
  std::swap(sweeps[0], sweeps[1]);
  EXPECT_THROW(accumulate_sweeps(sweeps, 0.3), std::invalid_argument);
}

TEST(AccumulateSweepsTest, AppliesEgoPose) {
  RadarSweep s;
  s.ego_pose = {std::numbers::pi / 2, 1.0, -2.0};
  s.points.push_back(RadarPoint::at({1.0, 0.0, 0.7}));
  const auto merged = accumulate_sweeps({s}, s.timestamp);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_NEAR(merged[0].position().x(), 1.0, 1e-12);
  EXPECT_NEAR(merged[0].position().y(), -1.0, 1e-12);
  EXPECT_DOUBLE_EQ(merged[0].position().z(), 0.7);
}

TEST(FusionTest, ConcatShapesAndIndices) {
  FeatureMap image(kImageBevChannels, 128, 128);
  image.at(63, 5, 6) = 3.0f;
  FeatureMap radar(kRadarChannels, 128, 128);
  radar.at(0, 5, 6) = 4.0f;
  radar.at(17, 127, 127) = 5.0f;

  const FeatureMap fused = fuse_concat(image, radar);
  EXPECT_EQ(fused.channels(), 82);
  EXPECT_EQ(fused.height(), 128);
  EXPECT_EQ(fused.width(), 128);
  EXPECT_EQ(fused.at(63, 5, 6), 3.0f);
  EXPECT_EQ(fused.at(64, 5, 6), 4.0f);
  EXPECT_EQ(fused.at(81, 127, 127), 5.0f);

  FeatureMap encoded(kEncodedBevChannels, 128, 128);
  const FeatureMap res = residual_concat(encoded, radar);
  EXPECT_EQ(res.channels(), 274);
  EXPECT_EQ(res.at(256, 5, 6), 4.0f);
  EXPECT_EQ(res.at(273, 127, 127), 5.0f);
}

TEST(FusionTest, RejectsMismatchedInputs) {
  EXPECT_THROW(fuse_concat(FeatureMap(64, 128, 128), FeatureMap(18, 64, 64)),
               std::invalid_argument);
  EXPECT_THROW(fuse_concat(FeatureMap(63, 8, 8), FeatureMap(18, 8, 8)), std::invalid_argument);
  EXPECT_THROW(residual_concat(FeatureMap(255, 8, 8), FeatureMap(18, 8, 8)),
               std::invalid_argument);
}

TEST(FusionTest, ForwardShapes) {
  const LinearStubEncoder enc(82, 256, 3);
  const FeatureMap image(64, 16, 16);
  const FeatureMap radar(18, 16, 16);
  EXPECT_EQ(bev_fusion_forward(image, radar, enc, {}).channels(), 274);
  EXPECT_EQ(bev_fusion_forward(image, radar, enc, {FusionVariant::kPillar, false}).channels(),
            256);
  EXPECT_THROW(bev_fusion_forward(image, radar, enc, {FusionVariant::kVoxelCompressor, true}),
               std::invalid_argument);
  const LinearStubEncoder wrong(80, 256, 3);
  EXPECT_THROW(bev_fusion_forward(image, radar, wrong, {}), std::invalid_argument);
}

TEST(LinearStubEncoderTest, PerCellLinearMap) {
  const LinearStubEncoder enc(3, 4, 9);
  std::vector<float> data(3 * 2 * 2);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = 0.5f * static_cast<float>(i) - 1.0f;
  const FeatureMap in(3, 2, 2, data);
  const FeatureMap out = enc.encode(in);
  ASSERT_EQ(out.channels(), 4);
  for (int o = 0; o < 4; ++o) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        double expect = 0.0;
        for (int i = 0; i < 3; ++i) expect += double(enc.weight(o, i)) * in.at(i, r, c);
        EXPECT_NEAR(out.at(o, r, c), expect, 1e-6);
      }
    }
  }
}

TEST(LinearStubEncoderTest, SeedDeterminesWeights) {
  const LinearStubEncoder a(5, 6, 1);
  const LinearStubEncoder b(5, 6, 1);
  const LinearStubEncoder c(5, 6, 2);
  EXPECT_EQ(a.weight(3, 4), b.weight(3, 4));
  EXPECT_NE(a.weight(3, 4), c.weight(3, 4));
  EXPECT_THROW(LinearStubEncoder(0, 6), std::invalid_argument);
}

}  // namespace
}  // namespace fusetrack
