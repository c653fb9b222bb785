#include "quenchmap/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "quenchmap/csv_io.hpp"

namespace quenchmap {

void AnnealSchedule::validate() const {
    if (tau_ns <= 0.0) throw std::runtime_error("schedule: tau must be positive");
    if (kind == ScheduleKind::linear) {
        if (gamma0 <= 0.0 || beta0 <= 0.0)
            throw std::runtime_error("schedule: linear kind needs gamma0 > 0 and beta0 > 0");
        return;
    }
    if (table.size() < 2) throw std::runtime_error("schedule: table needs at least 2 rows");
    if (table.front()[0] != 0.0 || table.back()[0] != 1.0)
        throw std::runtime_error("schedule: table must cover s=0 and s=1");
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (k > 0 && table[k][0] <= table[k - 1][0])
            throw std::runtime_error("schedule: table s values must be strictly increasing");
        if (table[k][1] < 0.0 || table[k][2] < 0.0)
            throw std::runtime_error("schedule: negative envelope value");
    }
    if (table.front()[1] <= 0.0 || table.back()[2] <= 0.0)
        throw std::runtime_error("schedule: need A(0) > 0 and B(1) > 0");
}

Envelopes evaluate(const AnnealSchedule& schedule, double s) {
    if (s < 0.0 || s > 1.0) throw std::runtime_error("schedule: s outside [0,1]");
    if (schedule.kind == ScheduleKind::linear)
        return {schedule.gamma0 * (1.0 - s), schedule.beta0 * s};

    const auto& t = schedule.table;
    std::size_t hi = 1;
    while (hi + 1 < t.size() && t[hi][0] < s) ++hi;
    const double s0 = t[hi - 1][0], s1 = t[hi][0];
    const double w = (s - s0) / (s1 - s0);
    return {t[hi - 1][1] + w * (t[hi][1] - t[hi - 1][1]),
            t[hi - 1][2] + w * (t[hi][2] - t[hi - 1][2])};
}

AnnealSchedule load_schedule_csv(const std::string& path, EnergyUnit unit) {
    CsvTable csv = read_csv(path);
    if (csv.header.size() != 3 || csv.header[0] != "s" || csv.header[1] != "A" || csv.header[2] != "B")
        throw std::runtime_error("schedule: expected header s,A,B in " + path);

    AnnealSchedule schedule;
    schedule.kind = ScheduleKind::tabulated;
    const double factor = unit == EnergyUnit::ghz ? kTwoPi : 1.0;
    for (const auto& row : csv.rows) {
        double s, a, b;
        if (!parse_double(row[0], s) || !parse_double(row[1], a) || !parse_double(row[2], b))
            throw std::runtime_error("schedule: non-numeric cell in " + path);
        schedule.table.push_back({s, a * factor, b * factor});
    }
    schedule.validate();
    return schedule;
}

std::string schedule_descriptor(const AnnealSchedule& schedule) {
    std::ostringstream out;
    if (schedule.kind == ScheduleKind::linear) {
        out << "linear g0=" << format_double(schedule.gamma0) << " b0=" << format_double(schedule.beta0);
    } else {
        out << "tabulated";
        for (const auto& row : schedule.table)
            out << ' ' << format_double(row[0]) << ':' << format_double(row[1]) << ':'
                << format_double(row[2]);
    }
    return out.str();
}

} // namespace quenchmap
