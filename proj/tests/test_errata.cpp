#include "doctest.h"

#include "cgbundle/errata.hpp"
#include "test_support.hpp"

using namespace cgb;
using namespace cgb::errata;
using Block = ConnectionCoefficients::Block;

TEST_CASE("printed index readings scored against the oracle") {
  std::mt19937_64 rng(31);
  for (double k : {1.0, -1.0})
    for (int n : {2, 3})
      for (const auto& params : {CGParams::sasaki(), CGParams::classic(), CGParams::a1b1()}) {
        auto chart = constant_curvature_chart(k, n);
        BundlePoint p{cgbtest::random_point(rng, n, 0.5), cgbtest::random_matrix(rng, n)};
        auto oracle = cg_connection_koszul(chart, params, p);
        INFO("k=", k, " n=", n, " ", params.name);
        CHECK(vertical_horizontal(chart, params, p, RaisedCurvature::j_last).block_max_diff(oracle, Block::VH_H) <
              1e-10);
        CHECK(vertical_horizontal(chart, params, p, RaisedCurvature::j_first).block_max_diff(oracle, Block::VH_H) >
              1e-3);
        CHECK(horizontal_vertical(chart, params, p, DirectionReading::direction_l)
                  .block_max_diff(oracle, Block::HV_H) < 1e-10);
        CHECK(horizontal_vertical(chart, params, p, DirectionReading::direction_i)
                  .block_max_diff(oracle, Block::HV_H) > 1e-3);
        const double printed_m =
            cg_connection_closed(chart, params, p, MCoefficient::printed).block_max_diff(oracle, Block::VV_V);
        if (params.name == "sasaki")
          CHECK(printed_m < 1e-12);  // b = a' = 0 makes both values of M vanish
        else
          CHECK(printed_m > 1e-3);
      }
}
