// Acceptance gate: the seven built-in reference checks, one test case each,
// with a one-line verdict per check on stdout.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>

#include "doctest.h"
#include "pointerlab/reference_checks.hpp"

using pointerlab::checks::CheckResult;

namespace {

bool report(int index, const CheckResult& r) {
    std::printf("[%s] check %d/7: %s: %s\n", r.passed ? "PASS" : "FAIL", index,
                r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    return r.passed;
}

}  // namespace

TEST_CASE("check 1: squeezed reference point") {
    CHECK(report(1, pointerlab::checks::check_squeezed_reference_point()));
}

TEST_CASE("check 2: gaussian closed forms") {
    CHECK(report(2, pointerlab::checks::check_gaussian_closed_forms()));
}

TEST_CASE("check 3: overlap inequality") {
    CHECK(report(3, pointerlab::checks::check_overlap_inequality()));
}

TEST_CASE("check 4: faithful certificates") {
    CHECK(report(4, pointerlab::checks::check_faithful_certificates()));
}

TEST_CASE("check 5: variational objective") {
    CHECK(report(5, pointerlab::checks::check_variational_objective()));
}

TEST_CASE("check 6: measurement statistics") {
    CHECK(report(6, pointerlab::checks::check_measurement_statistics()));
}

TEST_CASE("check 7: output contracts") {
    CHECK(report(7, pointerlab::checks::check_output_contracts()));
}
