#include <doctest.h>

#include <cmath>

#include "mmw/phy.hpp"
#include "mmw/scenario.hpp"

using namespace mmw;
using namespace mmw::phy;

TEST_CASE("free space path loss") {
  // 20 log10(4 pi d f / c) at d = 1 m, f = 60.48 GHz, c = 299792458 m/s,
  // evaluated independently: 68.0800 dB.
  CHECK(fspl_db(1.0, 60.48e9) == doctest::Approx(68.0800).epsilon(1e-4));
  // doubling the distance costs 20 log10(2) dB
  CHECK(fspl_db(2.0, 60.48e9) - fspl_db(1.0, 60.48e9) == doctest::Approx(6.0206).epsilon(1e-5));
  CHECK(fspl_db(14.0, 60.48e9) - fspl_db(7.0, 60.48e9) == doctest::Approx(6.0206).epsilon(1e-5));
}

TEST_CASE("link snr") {
  RadioConfig radio;

  SUBCASE("doubling distance lowers snr by 6.0206 dB") {
    const double s1 = link_snr({0, 0}, {3, 0}, {}, radio).snr_db;
    const double s2 = link_snr({0, 0}, {6, 0}, {}, radio).snr_db;
    CHECK(s1 - s2 == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
  }

  SUBCASE("a crossed wall subtracts exactly its attenuation") {
    const Wall wall{{2, -1}, {2, 1}, 30.0};
    const double open = link_snr({0, 0}, {4, 0}, {}, radio).snr_db;
    const double blocked = link_snr({0, 0}, {4, 0}, {&wall, 1}, radio).snr_db;
    CHECK(open - blocked == doctest::Approx(30.0));
  }

  SUBCASE("touching a wall endpoint does not count as crossing") {
    const Wall wall{{2, 0}, {2, 5}, 30.0};  // link passes through the endpoint
    const double open = link_snr({0, 0}, {4, 0}, {}, radio).snr_db;
    const double touch = link_snr({0, 0}, {4, 0}, {&wall, 1}, radio).snr_db;
    CHECK(open == doctest::Approx(touch));
  }

  SUBCASE("coincident positions clamp to the minimum distance") {
    const auto budget = link_snr({1, 1}, {1, 1}, {}, radio);
    CHECK(budget.distance_clamped);
    const auto at_min = link_snr({0, 0}, {radio.min_distance_m, 0}, {}, radio);
    CHECK(budget.snr_db == doctest::Approx(at_min.snr_db));
  }
}

TEST_CASE("snr to rate lookup") {
  RadioConfig radio;

  CHECK(snr_to_rate(-5.0, radio) == 0.0);
  CHECK(snr_to_rate(1.99, radio) == 0.0);
  CHECK(snr_to_rate(60.0, radio) == doctest::Approx(6.756e9));
  CHECK(snr_to_rate(radio.mcs_table.back().min_snr_db, radio) == doctest::Approx(6.756e9));
  // thresholds are closed lower bounds
  CHECK(snr_to_rate(2.0, radio) == doctest::Approx(693e6));
  CHECK(snr_to_rate(5.0, radio) == doctest::Approx(1386e6));
  CHECK(snr_to_rate(4.999, radio) == doctest::Approx(693e6));
}

TEST_CASE("mcs table shape") {
  const auto table = default_mcs_table();
  REQUIRE(table.size() == 8);
  CHECK(table.front().rate_bps == doctest::Approx(693e6));
  CHECK(table.back().rate_bps == doctest::Approx(6.756e9));
  for (std::size_t k = 1; k < table.size(); ++k) {
    CHECK(table[k].min_snr_db > table[k - 1].min_snr_db);
    CHECK(table[k].rate_bps > table[k - 1].rate_bps);
  }
}

TEST_CASE("rate matrix") {
  RadioConfig radio;

  SUBCASE("client at the centre of a symmetric square sees equal rates") {
    Topology topo;
    topo.width = topo.height = 20.0;
    topo.aps = scenario::grid_aps(20.0, 20.0, 2, 2);
    topo.clients = Matrix(1, 2);
    topo.clients << 10.0, 10.0;
    const Matrix rates = rate_matrix(topo, radio);
    for (Index j = 1; j < 4; ++j) CHECK(rates(0, j) == rates(0, 0));
    CHECK(rates(0, 0) > 0.0);
  }

  SUBCASE("nearer AP never has a lower rate") {
    Topology topo;
    topo.width = 40.0;
    topo.height = 10.0;
    topo.aps = Matrix(2, 2);
    topo.aps << 2.0, 5.0, 38.0, 5.0;
    topo.clients = Matrix(1, 2);
    topo.clients << 4.0, 5.0;
    const Matrix rates = rate_matrix(topo, radio);
    CHECK(rates(0, 0) > rates(0, 1));
  }

  SUBCASE("default radio covers the 9-AP 30x30 grid") {
    // Coverage radius of the lowest tier must exceed the half diagonal
    // (~21.2 m), so every point in the area reaches at least one AP.
    const double snr_at = [&](double d) {
      return radio.tx_power_dbm + 2.0 * radio.antenna_gain_dbi - fspl_db(d, radio.carrier_hz) -
             radio.noise_floor_dbm();
    }(std::sqrt(2.0) * 15.0);
    CHECK(snr_at >= radio.mcs_table.front().min_snr_db);

    Topology topo;
    topo.width = topo.height = 30.0;
    topo.aps = scenario::grid_aps(30.0, 30.0, 3, 3);
    topo.clients = Matrix(3, 2);
    topo.clients << 0.0, 0.0, 29.9, 0.1, 17.3, 22.8;
    const Matrix rates = rate_matrix(topo, radio);
    for (Index i = 0; i < 3; ++i) CHECK((rates.row(i).array() > 0.0).any());
  }

  SUBCASE("a fully walled-off client raises out-of-coverage naming it") {
    Topology topo;
    topo.width = 30.0;
    topo.height = 30.0;
    topo.aps = Matrix(1, 2);
    topo.aps << 5.0, 15.0;
    topo.clients = Matrix(2, 2);
    topo.clients << 6.0, 15.0, 25.0, 15.0;
    topo.walls.push_back(Wall{{20.0, 0.0}, {20.0, 30.0}, 200.0});
    try {
      rate_matrix(topo, radio);
      FAIL("expected out-of-coverage");
    } catch (const InfeasibleInstanceError& e) {
      CHECK(e.client() == 1);
      CHECK(std::string(e.what()).find("client 1") != std::string::npos);
    }
  }

  SUBCASE("deterministic: identical inputs, identical matrices") {
    Topology topo;
    topo.width = topo.height = 30.0;
    topo.aps = scenario::grid_aps(30.0, 30.0, 3, 3);
    topo.clients = Matrix(2, 2);
    topo.clients << 3.3, 4.4, 21.0, 9.5;
    const Matrix a = rate_matrix(topo, radio);
    const Matrix b = rate_matrix(topo, radio);
    CHECK((a.array() == b.array()).all());
  }
}

TEST_CASE("rate monotonicity in distance and wall loss") {
  RadioConfig radio;
  double previous = std::numeric_limits<double>::infinity();
  for (double d = 1.0; d < 200.0; d *= 1.3) {
    const double rate = snr_to_rate(link_snr({0, 0}, {d, 0}, {}, radio).snr_db, radio);
    CHECK(rate <= previous);
    previous = rate;
  }
  const Wall thin{{5, -1}, {5, 1}, 5.0};
  const Wall thick{{5, -1}, {5, 1}, 25.0};
  const double r_open = snr_to_rate(link_snr({0, 0}, {10, 0}, {}, radio).snr_db, radio);
  const double r_thin = snr_to_rate(link_snr({0, 0}, {10, 0}, {&thin, 1}, radio).snr_db, radio);
  const double r_thick = snr_to_rate(link_snr({0, 0}, {10, 0}, {&thick, 1}, radio).snr_db, radio);
  CHECK(r_open >= r_thin);
  CHECK(r_thin >= r_thick);
}
