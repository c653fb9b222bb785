#include "doctest.h"

#include <cmath>

#include "quenchmap/schedule.hpp"

#include "helpers.hpp"

using namespace quenchmap;
using testutil::TempDir;
using testutil::write_text;

TEST_SUITE("schedule") {

TEST_CASE("linear schedule interpolates between pure driver and pure problem") {
    AnnealSchedule sched; // defaults gamma0 = beta0 = 2*pi
    sched.validate();

    const Envelopes start = evaluate(sched, 0.0);
    CHECK(start.a == kTwoPi);
    CHECK(start.b == 0.0);
    const Envelopes end = evaluate(sched, 1.0);
    CHECK(end.a == 0.0);
    CHECK(end.b == kTwoPi);
    const Envelopes mid = evaluate(sched, 0.5);
    CHECK(mid.a == doctest::Approx(kTwoPi / 2).epsilon(1e-15));
    CHECK(mid.b == doctest::Approx(kTwoPi / 2).epsilon(1e-15));

    CHECK_THROWS(evaluate(sched, -0.01));
    CHECK_THROWS(evaluate(sched, 1.01));

    AnnealSchedule bad = sched;
    bad.gamma0 = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("tabulated schedule interpolates linearly inside each bracket") {
    AnnealSchedule sched;
    sched.kind = ScheduleKind::tabulated;
    sched.table = {{0.0, 2.0, 0.0}, {0.5, 1.0, 3.0}, {1.0, 0.0, 6.0}};
    sched.validate();

    const Envelopes q = evaluate(sched, 0.25);
    CHECK(q.a == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(q.b == doctest::Approx(1.5).epsilon(1e-15));
    const Envelopes knot = evaluate(sched, 0.5);
    CHECK(knot.a == 1.0);
    CHECK(knot.b == 3.0);
    const Envelopes late = evaluate(sched, 0.75);
    CHECK(late.a == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(late.b == doctest::Approx(4.5).epsilon(1e-15));

    // small steps in s produce small steps in the envelopes
    double prev_a = evaluate(sched, 0.0).a;
    double prev_b = evaluate(sched, 0.0).b;
    for (int k = 1; k <= 1000; ++k) {
        const Envelopes e = evaluate(sched, k / 1000.0);
        CHECK(std::abs(e.a - prev_a) < 0.01);
        CHECK(std::abs(e.b - prev_b) < 0.01);
        prev_a = e.a;
        prev_b = e.b;
    }
}

TEST_CASE("tabulated schedule validation rejects malformed tables") {
    AnnealSchedule sched;
    sched.kind = ScheduleKind::tabulated;

    sched.table = {{0.0, 2.0, 0.0}};
    CHECK_THROWS(sched.validate()); // too short

    sched.table = {{0.1, 2.0, 0.0}, {1.0, 0.0, 6.0}};
    CHECK_THROWS(sched.validate()); // does not cover s = 0

    sched.table = {{0.0, 2.0, 0.0}, {0.5, 1.0, 3.0}, {0.5, 0.5, 4.0}, {1.0, 0.0, 6.0}};
    CHECK_THROWS(sched.validate()); // s not strictly increasing

    sched.table = {{0.0, 0.0, 0.0}, {1.0, 0.0, 6.0}};
    CHECK_THROWS(sched.validate()); // no transverse drive at s = 0

    sched.table = {{0.0, 2.0, 0.0}, {1.0, 1.0, 0.0}};
    CHECK_THROWS(sched.validate()); // no problem term at s = 1

    sched.table = {{0.0, 2.0, 0.0}, {0.5, -1.0, 3.0}, {1.0, 0.0, 6.0}};
    CHECK_THROWS(sched.validate()); // negative envelope
}

TEST_CASE("schedule csv loads and converts GHz to rad/ns") {
    TempDir tmp;
    write_text(tmp.file("s.csv"),
               "s,A,B\n"
               "0,1.0,0\n"
               "0.5,0.5,0.75\n"
               "1,0,1.5\n");
    const AnnealSchedule ghz = load_schedule_csv(tmp.file("s.csv"), EnergyUnit::ghz);
    CHECK(ghz.kind == ScheduleKind::tabulated);
    CHECK(evaluate(ghz, 0.0).a == doctest::Approx(kTwoPi).epsilon(1e-15));
    CHECK(evaluate(ghz, 0.5).b == doctest::Approx(0.75 * kTwoPi).epsilon(1e-15));

    const AnnealSchedule rad = load_schedule_csv(tmp.file("s.csv"), EnergyUnit::rad_per_ns);
    CHECK(evaluate(rad, 0.0).a == 1.0);

    write_text(tmp.file("bad.csv"), "s,gamma,B\n0,1,0\n1,0,1\n");
    CHECK_THROWS(load_schedule_csv(tmp.file("bad.csv"), EnergyUnit::ghz));
}

TEST_CASE("schedule descriptor distinguishes schedules") {
    AnnealSchedule linear;
    AnnealSchedule scaled = linear;
    scaled.gamma0 *= 2.0;
    AnnealSchedule tab;
    tab.kind = ScheduleKind::tabulated;
    tab.table = {{0.0, 2.0, 0.0}, {1.0, 0.0, 6.0}};

    CHECK(schedule_descriptor(linear) != schedule_descriptor(scaled));
    CHECK(schedule_descriptor(linear) != schedule_descriptor(tab));
    CHECK(schedule_descriptor(linear) == schedule_descriptor(AnnealSchedule{}));
}

} // TEST_SUITE
