#include "loadcast/synthetic.hpp"

#include <cmath>

#include "loadcast/rng.hpp"

namespace loadcast {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Stream ids, one per generated column. Fixed so that adding columns never
// reshuffles existing ones.
enum Stream : std::uint64_t {
    kTemp = 1,
    kHumidity = 2,
    kLightLiving = 3,
    kLightKitchen = 4,
    kWasher = 5,
    kFridge = 6,
    kMicrowave = 7,
    kFans = 8,
};

// Paints [start, start+duration) of `day` with wattage, clipped to the day.
void paint(std::vector<double>& col, int day, int start_min, int duration, double watts) {
    const int day_base = day * 1440;
    const int end = std::min(start_min + duration, 1440);
    for (int m = std::max(start_min, 0); m < end; ++m) col[day_base + m] = watts;
}

// Adds wattage on top of whatever is already burning (overlapping fixtures
// on the same submeter).
void paint_add(std::vector<double>& col, int day, int start_min, int duration, double watts) {
    const int day_base = day * 1440;
    const int end = std::min(start_min + duration, 1440);
    for (int m = std::max(start_min, 0); m < end; ++m) col[day_base + m] += watts;
}

// The lighting submeters read whole circuits, not single bulbs. Several
// fixtures per room switch independently, so within any evening hour the
// column steps through a handful of levels instead of one flat block.
std::vector<double> simulate_light_living(int days, Rng rng) {
    std::vector<double> col(static_cast<std::size_t>(days) * 1440, 0.0);
    for (int d = 0; d < days; ++d) {
        if (rng.next_unit() < 0.65) {
            const int start = 380 + static_cast<int>(rng.next_below(40));  // ~06:20
            const int dur = 30 + static_cast<int>(rng.next_below(61));
            paint(col, d, start, dur, 55.0 * rng.uniform(0.9, 1.1));
        }
        const int start = 1020 + static_cast<int>(rng.next_below(90));  // ~17:00
        const int end = 1350 + static_cast<int>(rng.next_below(80));    // ~22:30
        paint(col, d, start, std::max(end - start, 30), 55.0 * rng.uniform(0.9, 1.1));

        // Floor lamp joins the ceiling light for parts of the evening.
        const int episodes = 1 + static_cast<int>(rng.next_below(3));
        for (int e = 0; e < episodes; ++e) {
            const int estart = start + static_cast<int>(rng.next_below(
                static_cast<std::uint64_t>(std::max(end - start - 25, 1))));
            const int edur = 25 + static_cast<int>(rng.next_below(56));
            paint_add(col, d, estart, std::min(edur, end - estart), 25.0 * rng.uniform(0.9, 1.1));
        }
        // Reading lamp on some evenings.
        if (rng.next_unit() < 0.4) {
            const int rstart = start + static_cast<int>(rng.next_below(
                static_cast<std::uint64_t>(std::max(end - start - 30, 1))));
            const int rdur = 30 + static_cast<int>(rng.next_below(61));
            paint_add(col, d, rstart, std::min(rdur, end - rstart), 40.0 * rng.uniform(0.9, 1.1));
        }
    }
    return col;
}

std::vector<double> simulate_light_kitchen(int days, Rng rng) {
    std::vector<double> col(static_cast<std::size_t>(days) * 1440, 0.0);
    for (int d = 0; d < days; ++d) {
        if (rng.next_unit() < 0.8) {
            const int start = 400 + static_cast<int>(rng.next_below(30));  // ~06:40
            const int dur = 20 + static_cast<int>(rng.next_below(41));
            paint(col, d, start, dur, 80.0 * rng.uniform(0.9, 1.1));
        }
        if (rng.next_unit() < 0.5) {
            const int start = 720 + static_cast<int>(rng.next_below(60));  // ~12:00
            const int dur = 15 + static_cast<int>(rng.next_below(31));
            paint(col, d, start, dur, 80.0 * rng.uniform(0.9, 1.1));
        }
        const int start = 1050 + static_cast<int>(rng.next_below(60));  // ~17:30
        const int dur = 90 + static_cast<int>(rng.next_below(91));
        paint(col, d, start, dur, 80.0 * rng.uniform(0.9, 1.1));

        // Under-cabinet strip flips on and off around the main light during
        // the evening, and for the occasional late snack.
        const int episodes = 1 + static_cast<int>(rng.next_below(2));
        for (int e = 0; e < episodes; ++e) {
            const int estart = start + static_cast<int>(rng.next_below(
                static_cast<std::uint64_t>(std::max(dur + 60, 1))));
            const int edur = 10 + static_cast<int>(rng.next_below(31));
            paint_add(col, d, estart, edur, 30.0 * rng.uniform(0.9, 1.1));
        }
        if (rng.next_unit() < 0.15) {
            const int sstart = 1320 + static_cast<int>(rng.next_below(90));  // 22:00-23:30
            const int sdur = 5 + static_cast<int>(rng.next_below(11));
            paint_add(col, d, sstart, sdur, 30.0 * rng.uniform(0.9, 1.1));
        }
    }
    return col;
}

std::vector<double> simulate_washer(int days, Rng rng) {
    std::vector<double> col(static_cast<std::size_t>(days) * 1440, 0.0);
    for (int d = 0; d < days; ++d) {
        if (rng.next_unit() < 0.45) {
            const int start = 540 + static_cast<int>(rng.next_below(600));  // 09:00-19:00
            const int dur = 50 + static_cast<int>(rng.next_below(26));
            paint(col, d, start, dur, 500.0 * rng.uniform(0.9, 1.1));
        }
    }
    return col;
}

// Compressor duty cycle, independent of the day boundary. Dwell times are
// long relative to the coarsest (10-minute) resampling grid so the cycle
// stays visible after averaging instead of aliasing into bin noise, and the
// off phase stays under an hour so even a one-hour slice of data contains
// both compressor levels.
std::vector<double> simulate_fridge(int days, Rng rng) {
    const std::size_t n = static_cast<std::size_t>(days) * 1440;
    std::vector<double> col(n, 0.0);
    std::size_t t = rng.next_below(20);  // random initial phase, starts off
    while (t < n) {
        t += 44 + rng.next_below(15);  // off 44..58 min
        if (t >= n) break;
        const std::size_t on = 42 + rng.next_below(17);  // on 42..58 min
        const double watts = 50.0 * rng.uniform(0.95, 1.05);
        for (std::size_t m = t; m < std::min(t + on, n); ++m) col[m] = watts;
        t += on;
    }
    return col;
}

std::vector<double> simulate_microwave(int days, Rng rng) {
    std::vector<double> col(static_cast<std::size_t>(days) * 1440, 0.0);
    for (int d = 0; d < days; ++d) {
        const int uses = 2 + static_cast<int>(rng.next_below(5));  // 2..6 per day
        for (int u = 0; u < uses; ++u) {
            const double slot = rng.next_unit();
            int start;
            if (slot < 0.25)
                start = 420 + static_cast<int>(rng.next_below(90));  // breakfast
            else if (slot < 0.55)
                start = 720 + static_cast<int>(rng.next_below(90));  // lunch
            else if (slot < 0.90)
                start = 1080 + static_cast<int>(rng.next_below(120));  // dinner
            else
                start = 600 + static_cast<int>(rng.next_below(720));  // snack
            const int dur = 1 + static_cast<int>(rng.next_below(4));  // 1..4 min
            paint(col, d, start, dur, 1100.0 * rng.uniform(0.95, 1.05));
        }
    }
    return col;
}

std::vector<double> simulate_fans(int days, Rng rng) {
    std::vector<double> col(static_cast<std::size_t>(days) * 1440, 0.0);
    for (int d = 0; d < days; ++d) {
        const int runs = 2 + static_cast<int>(rng.next_below(4));  // 2..5 per day
        for (int r = 0; r < runs; ++r) {
            const int start = 390 + static_cast<int>(rng.next_below(930));  // 06:30-22:00
            const int dur = 10 + static_cast<int>(rng.next_below(21));
            paint(col, d, start, dur, 75.0 * rng.uniform(0.9, 1.1));
        }
    }
    return col;
}

} // namespace

TimeSeriesFrame generate_synthetic(int days, std::uint64_t seed) {
    if (days < 1) throw ToolkitError("generate_synthetic requires days >= 1");
    const std::size_t n = static_cast<std::size_t>(days) * 1440;
    const Rng root(seed);

    // Outdoor temperature: autumn-to-winter drift, daily cycle peaking at
    // 15:00, plus AR(1) weather noise.
    std::vector<double> temp(n), humidity(n);
    {
        Rng trng = root.stream(kTemp);
        Rng hrng = root.stream(kHumidity);
        double ar_t = 0.0, ar_h = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int day = static_cast<int>(i / 1440);
            const int minute = static_cast<int>(i % 1440);
            const double season_mean = std::max(18.0 - 10.0 * day / 182.0, 5.0);
            const double cycle = 4.5 * std::cos(2.0 * kPi * (minute - 900) / 1440.0);
            ar_t = 0.5 * ar_t + 0.05 * trng.next_normal();
            temp[i] = season_mean + cycle + ar_t;

            ar_h = 0.6 * ar_h + 0.08 * hrng.next_normal();
            const double h = 68.0 - 1.6 * cycle + ar_h;
            humidity[i] = std::min(std::max(h, 25.0), 98.0);
        }
    }

    std::vector<double> living = simulate_light_living(days, root.stream(kLightLiving));
    std::vector<double> kitchen = simulate_light_kitchen(days, root.stream(kLightKitchen));
    std::vector<double> washer = simulate_washer(days, root.stream(kWasher));
    std::vector<double> fridge = simulate_fridge(days, root.stream(kFridge));
    std::vector<double> microwave = simulate_microwave(days, root.stream(kMicrowave));
    std::vector<double> fans = simulate_fans(days, root.stream(kFans));

    // Target is the exact sum of the device columns, in column order.
    std::vector<double> total(n);
    for (std::size_t i = 0; i < n; ++i)
        total[i] = living[i] + kitchen[i] + washer[i] + fridge[i] + microwave[i] + fans[i];

    std::int64_t start_ts = 0;
    parse_timestamp("2020-10-01T00:00:00", start_ts);
    std::vector<std::int64_t> timestamps(n);
    for (std::size_t i = 0; i < n; ++i) timestamps[i] = start_ts + static_cast<std::int64_t>(i);

    std::vector<Column> cols;
    cols.push_back({"temp_out_c", std::move(temp), "degC"});
    cols.push_back({"humidity_pct", std::move(humidity), "%"});
    cols.push_back({"light_living_w", std::move(living), "W"});
    cols.push_back({"light_kitchen_w", std::move(kitchen), "W"});
    cols.push_back({"washer_w", std::move(washer), "W"});
    cols.push_back({"fridge_w", std::move(fridge), "W"});
    cols.push_back({"microwave_w", std::move(microwave), "W"});
    cols.push_back({"fans_w", std::move(fans), "W"});
    cols.push_back({"total_w", std::move(total), "W"});

    return TimeSeriesFrame::create(std::move(timestamps), std::move(cols), "total_w");
}

} // namespace loadcast
