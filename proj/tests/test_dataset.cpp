#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sequencer/dataset.hpp"
#include "sequencer/error.hpp"

using namespace sequencer;

TEST_SUITE_BEGIN("dataset");

TEST_CASE("load_object_set passes dimensions through") {
  const auto set = oracles::make_objects({{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12}});
  CHECK(set.n_obj() == 3);
  CHECK(set.n_pix() == 4);
  CHECK(set.values(2, 1) == 10.0);
}

TEST_CASE("load_object_set rejects bad input") {
  Matrix nan_matrix = oracles::make_matrix({{1, 2}, {3, 4}, {5, 6}});
  nan_matrix(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(load_object_set(nan_matrix), "non-finite value at (1, 0)", InputError);

  Matrix inf_matrix = oracles::make_matrix({{1, 2}, {3, 4}, {5, 6}});
  inf_matrix(2, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(load_object_set(inf_matrix), InputError);

  CHECK_THROWS_WITH_AS(load_object_set(Matrix(2, 10, 1.0)), "need at least 3 objects",
                       InputError);
  CHECK_THROWS_AS(load_object_set(Matrix(3, 1, 1.0)), InputError);
  CHECK_THROWS_AS(load_object_set(Matrix(3, 3, 1.0), {"a", "b"}), InputError);
}

TEST_CASE("scale grid depth follows the twenty-pixel rule") {
  SUBCASE("small inputs stay at the whole-object scale") {
    const auto grid = build_scale_grid(8);
    CHECK(grid.scales == std::vector<int>{0});
    CHECK(grid.bounds(0, 0).begin == 0);
    CHECK(grid.bounds(0, 0).end == 8);
  }
  SUBCASE("400 pixels reach scale 5 with 12 or 13 pixel segments") {
    const auto grid = build_scale_grid(400);
    CHECK(grid.scales == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(grid.segments_at(5) == 32);
    for (std::size_t m = 0; m < 32; ++m) {
      const auto size = grid.bounds(5, static_cast<int>(m)).size();
      CHECK(size >= 12);
      CHECK(size <= 13);
    }
  }
  SUBCASE("boundary cases") {
    CHECK(build_scale_grid(20).max_scale() == 0);
    CHECK(build_scale_grid(21).max_scale() == 1);
    CHECK(build_scale_grid(2).max_scale() == 0);
  }
}

TEST_CASE("uneven pixels split as evenly as possible, extras first") {
  const auto grid = build_scale_grid(7, 1);
  REQUIRE(grid.scales == std::vector<int>{0, 1});
  CHECK(grid.bounds(1, 0).begin == 0);
  CHECK(grid.bounds(1, 0).end == 4);
  CHECK(grid.bounds(1, 1).begin == 4);
  CHECK(grid.bounds(1, 1).end == 7);
}

TEST_CASE("grid override errors when segments would get too short") {
  CHECK_THROWS_AS(build_scale_grid(7, 2), ConfigError);
  CHECK_THROWS_AS(build_scale_grid(16, 4), ConfigError);
  CHECK_NOTHROW(build_scale_grid(16, 3));  // exactly two pixels per segment
}

TEST_CASE("segments partition the pixel range at every scale") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pix(2, 600);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n_pix = trial == 0 ? 400 : pix(rng);
    const auto grid = build_scale_grid(n_pix);
    for (int l : grid.scales) {
      std::size_t expected_begin = 0;
      for (std::size_t m = 0; m < grid.segments_at(l); ++m) {
        const auto& b = grid.bounds(l, static_cast<int>(m));
        CHECK(b.begin == expected_begin);
        CHECK(b.size() >= 1);
        expected_begin = b.end;
      }
      CHECK(expected_begin == n_pix);
      CHECK(grid.segments_at(l) == (std::size_t{1} << l));
    }
  }
}

TEST_CASE("build_scale_grid is a pure function of its arguments") {
  const auto a = build_scale_grid(123, 3);
  const auto b = build_scale_grid(123, 3);
  CHECK(a.scales == b.scales);
  for (int l : a.scales)
    for (std::size_t m = 0; m < a.segments_at(l); ++m) {
      CHECK(a.bounds(l, static_cast<int>(m)).begin == b.bounds(l, static_cast<int>(m)).begin);
      CHECK(a.bounds(l, static_cast<int>(m)).end == b.bounds(l, static_cast<int>(m)).end);
    }
}

TEST_CASE("segment normalization") {
  const auto set = oracles::make_objects({{2, 2, 4}, {1, 1, 2}, {5, 0, 0}});
  const auto grid = build_scale_grid(3);

  SUBCASE("rows sum to one") {
    const auto seg = segment_and_normalize(set, grid, 0, 0);
    CHECK(seg.data(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(seg.data(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(seg.data(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        sum += seg.data(j, i);
        CHECK(seg.data(j, i) >= 0.0);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("zero-sum row is degenerate") {
    const auto zero = oracles::make_objects({{0, 0, 0}, {1, 1, 2}, {5, 0, 0}});
    CHECK_THROWS_WITH_AS(segment_and_normalize(zero, grid, 0, 0),
                         "degenerate segment for object 0", DegenerateError);
  }

  SUBCASE("negative values error without offset mode") {
    const auto neg = oracles::make_objects({{-1, 0, 3}, {1, 1, 2}, {5, 0, 0}});
    CHECK_THROWS_AS(segment_and_normalize(neg, grid, 0, 0), InputError);
  }

  SUBCASE("offset mode shifts each row by its own minimum") {
    const auto neg = oracles::make_objects({{-1, 0, 3}, {1, 1, 2}, {5, 0, 0}});
    const auto seg = segment_and_normalize(neg, grid, 0, 0, true);
    CHECK(seg.data(0, 0) == doctest::Approx(0.0));
    CHECK(seg.data(0, 1) == doctest::Approx(0.2));
    CHECK(seg.data(0, 2) == doctest::Approx(0.8));
  }

  SUBCASE("constant row becomes degenerate under offset mode") {
    const auto flat = oracles::make_objects({{3, 3, 3}, {1, 1, 2}, {5, 0, 0}});
    CHECK_THROWS_AS(segment_and_normalize(flat, grid, 0, 0, true), DegenerateError);
  }

  SUBCASE("out-of-range scale or segment") {
    CHECK_THROWS_AS(segment_and_normalize(set, grid, 1, 0), ConfigError);
    CHECK_THROWS_AS(segment_and_normalize(set, grid, 0, 1), ConfigError);
  }
}

TEST_CASE("normalization is idempotent per segment") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> value(0.05, 3.0);
  Matrix m(4, 24);
  for (auto& v : m.data()) v = value(rng);
  const auto set = load_object_set(std::move(m));
  const auto grid = build_scale_grid(24, 2);

  for (int l : grid.scales) {
    for (std::size_t seg_idx = 0; seg_idx < grid.segments_at(l); ++seg_idx) {
      const auto once = segment_and_normalize(set, grid, l, static_cast<int>(seg_idx));
      // Re-normalizing the already-normalized segment changes nothing.
      const auto again_set = load_object_set(once.data);
      const auto seg_grid = build_scale_grid(once.data.cols(), 0);
      const auto twice = segment_and_normalize(again_set, seg_grid, 0, 0);
      for (std::size_t j = 0; j < once.data.rows(); ++j)
        for (std::size_t i = 0; i < once.data.cols(); ++i)
          CHECK(twice.data(j, i) == doctest::Approx(once.data(j, i)).epsilon(1e-12));
    }
  }
}

TEST_SUITE_END();
