#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "fadesim/fadesim.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string r = s ? s : "";
  fadesim_string_free(s);
  return r;
}

void collect(const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); }

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(fadesim_version()).size() > 0);
  CHECK(fadesim_build_id() != nullptr);
  CHECK(std::string(fadesim_status_name(FADESIM_ERR_IO)) != std::string(fadesim_status_name(FADESIM_OK)));
}

TEST_CASE("special functions and error reporting") {
  double v = 0.0;
  REQUIRE(fadesim_bessel_i0_scaled(0.0, &v) == FADESIM_OK);
  CHECK(v == 1.0);
  REQUIRE(fadesim_bessel_i1_scaled(0.0, &v) == FADESIM_OK);
  CHECK(v == 0.0);
  CHECK(fadesim_bessel_i0_scaled(-1.0, &v) == FADESIM_ERR_DOMAIN);
  CHECK(std::string(fadesim_last_error()).size() > 0);
  CHECK(fadesim_bessel_i0_scaled(1.0, nullptr) == FADESIM_ERR_NULL);
}

TEST_CASE("model handles") {
  fadesim_model* m = nullptr;
  REQUIRE(fadesim_model_rayleigh(1.0, 1.0, 1.0, 1.0, &m) == FADESIM_OK);
  fadesim_kind k;
  REQUIRE(fadesim_model_kind(m, &k) == FADESIM_OK);
  CHECK(k == FADESIM_RAYLEIGH);
  double a = 0, b = 0;
  REQUIRE(fadesim_model_coeffs(m, 0.0, 2.0, &a, &b) == FADESIM_OK);
  CHECK(a == doctest::Approx(-1.0));  // B (sigma^2 - r)
  CHECK(b == doctest::Approx(2.0));   // sigma sqrt(2 B r)
  fadesim_model_free(m);

  CHECK(fadesim_model_rayleigh(-1.0, 1.0, 0.0, 0.0, &m) == FADESIM_ERR_CONFIG);
  CHECK(std::string(fadesim_last_error()).find("B") != std::string::npos);

  fadesim_ou_params p{1, 1, 1, 1, 1, 1, 1, 1};
  REQUIRE(fadesim_model_from_ou(&p, 1, &m) == FADESIM_OK);
  REQUIRE(fadesim_model_kind(m, &k) == FADESIM_OK);
  CHECK(k == FADESIM_RICE);
  fadesim_model_free(m);
  fadesim_ou_params beck{1, 2, 1, 0, 1, 1, 0, 0};
  CHECK(fadesim_model_from_ou(&beck, 0, &m) == FADESIM_ERR_CONFIG);
  fadesim_model_free(nullptr);
}

TEST_CASE("simulation and Monte Carlo") {
  fadesim_model* m = nullptr;
  REQUIRE(fadesim_model_rayleigh(1.0, 1.0, 1.0, 1.0, &m) == FADESIM_OK);
  std::vector<double> r(11), z(11), r2(11), z2(11);
  REQUIRE(fadesim_simulate(m, FADESIM_SYSTEM_PROJECTED, 0.5, 1.0, 10, 3, 0, r.data(), z.data()) == FADESIM_OK);
  REQUIRE(fadesim_simulate(m, FADESIM_SYSTEM_PROJECTED, 0.5, 1.0, 10, 3, 0, r2.data(), z2.data()) == FADESIM_OK);
  CHECK(r == r2);
  CHECK(r[0] == 2.0);
  CHECK(z[0] == 0.0);
  CHECK(fadesim_simulate(m, FADESIM_SYSTEM_IQ, 0.5, 1.0, 0, 3, 0, r.data(), z.data()) == FADESIM_ERR_CONFIG);

  const double w[] = {0.0, 1.0};
  double p[2], var[2], jump = 0;
  REQUIRE(fadesim_mc_ccdf(m, FADESIM_SYSTEM_IQ, 0.5, 4.0, 50, 4000, 1, 2, w, 2, p, var, &jump) == FADESIM_OK);
  CHECK(p[0] + jump == doctest::Approx(1.0));  // jump = P(Z(T) = 0)
  CHECK(p[1] <= p[0]);
  CHECK(var[0] == doctest::Approx(p[0] * (1 - p[0])));
  fadesim_model_free(m);
}

TEST_CASE("grid lifecycle and importance sampling") {
  fadesim_kbe_config c{4.0, 40, 40, 0.0, 1.0, 1.0, 0.5};
  fadesim_grid* g = nullptr;
  REQUIRE(fadesim_kbe_solve(&c, &g) == FADESIM_OK);
  double v = 0;
  REQUIRE(fadesim_grid_value(g, 0.0, 2.0, 0.0, 0.0, &v) == FADESIM_OK);
  CHECK(v == doctest::Approx(1.0));
  double u = 0;
  REQUIRE(fadesim_grid_control(g, 1.0, 0.5, 0.0, 2.0, &u) == FADESIM_OK);
  CHECK(std::isfinite(u));

  const fs::path base = fs::temp_directory_path() / "fadesim_capi_grid";
  REQUIRE(fadesim_grid_save(g, base.string().c_str()) == FADESIM_OK);
  fadesim_grid* h = nullptr;
  REQUIRE(fadesim_grid_load(base.string().c_str(), 1, &h) == FADESIM_OK);
  double v2 = 0;
  REQUIRE(fadesim_grid_value(h, 1.0, 1.0, 0.5, 2.0, &v2) == FADESIM_OK);
  REQUIRE(fadesim_grid_value(g, 1.0, 1.0, 0.5, 2.0, &v) == FADESIM_OK);
  CHECK(v == v2);
  fadesim_grid_free(h);
  CHECK(fadesim_grid_load("/nonexistent/grid", 0, &h) == FADESIM_ERR_IO);

  fadesim_model* m = nullptr;
  REQUIRE(fadesim_model_rayleigh(1.0, 1.0, 1.0, 1.0, &m) == FADESIM_OK);
  fadesim_is_result res{};
  REQUIRE(fadesim_is_estimate(m, g, 0.5, 100, 3.0, 2000, 1, 2, &res) == FADESIM_OK);
  CHECK(res.p_hat > 0.0);
  CHECK(res.m_samples == 2000);
  CHECK(fadesim_is_estimate(m, g, 0.7, 100, 3.0, 2000, 1, 2, &res) == FADESIM_ERR_CONFIG);
  fadesim_model_free(m);
  fadesim_grid_free(g);
  fs::remove(base.string() + ".json");
  fs::remove(base.string() + ".bin");
}

TEST_CASE("config validation and runs") {
  char* resolved = nullptr;
  REQUIRE(fadesim_validate_config(R"({"model": {"class": "rayleigh"}})", "{\"seed\": 7}", "cfg.json", "", &resolved) ==
          FADESIM_OK);
  CHECK(take(resolved).find("\"seed\": 7") != std::string::npos);

  CHECK(fadesim_validate_config("{\n\"model\": {\"class\": \"rice\", \"i0\": 1, \"q0\": 2},\n\"T\": -1}", nullptr,
                                "cfg.json", "", nullptr) == FADESIM_ERR_CONFIG);
  const std::string err = fadesim_last_error();
  CHECK(err.find("2 configuration error(s)") != std::string::npos);
  CHECK(err.find("cfg.json:2: model.q0") != std::string::npos);
  CHECK(err.find("cfg.json:3: T") != std::string::npos);

  const fs::path dir = fs::temp_directory_path() / "fadesim_capi_run";
  fs::remove_all(dir);
  std::vector<std::string> lines;
  char* report = nullptr;
  const std::string text = R"({"model": {"class": "rayleigh"}, "M": 500, "N": 20, "w": [0, 1], "system": "iq"})";
  REQUIRE(fadesim_run("ccdf-mc", text.c_str(), nullptr, "inline", dir.string().c_str(), collect, &lines, &report) ==
          FADESIM_OK);
  CHECK(take(report).find("ccdf_mc.csv") != std::string::npos);
  CHECK(fs::exists(dir / "ccdf_mc.csv"));
  CHECK(fadesim_run("bogus", text.c_str(), nullptr, "inline", dir.string().c_str(), nullptr, nullptr, nullptr) ==
        FADESIM_ERR_CONFIG);
  fs::remove_all(dir);

  char* list = nullptr;
  REQUIRE(fadesim_subcommands(&list) == FADESIM_OK);
  CHECK(take(list).find("kbe-solve") != std::string::npos);
  REQUIRE(fadesim_reproduce_targets(&list) == FADESIM_OK);
  CHECK(take(list).find("fig9") != std::string::npos);
  CHECK(fadesim_reproduce("nope", 0, 0, nullptr, 0, nullptr, nullptr, nullptr) == FADESIM_ERR_CONFIG);
}
