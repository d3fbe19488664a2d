#include "udn/validation.hpp"

#include <doctest.h>

TEST_CASE("acceptance report format") {
  std::vector<udn::CriterionResult> results(2);
  results[0].id = 1;
  results[0].name = "first check";
  results[0].passed = true;
  results[0].measured = 1.5e-8;
  results[0].tolerance = 1e-6;
  results[1].id = 2;
  results[1].name = "second check";
  results[1].passed = false;
  results[1].measured = 0.5;
  results[1].tolerance = 0.25;

  const std::string report = udn::acceptance_report(results);
  CHECK(report ==
        "id,status,measured,tolerance,name\n"
        "1,pass,1.5e-08,1e-06,first check\n"
        "2,fail,0.5,0.25,second check\n");
}
