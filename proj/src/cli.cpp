#include "finsler/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/report.hpp"

namespace finsler {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError(what + " is not a number: " + text);
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw InputError("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<Interval> fit_box(const std::vector<Interval>& box, int dim, const char* what) {
    if (box.size() == 1) return std::vector<Interval>(static_cast<std::size_t>(dim), box.front());
    if (static_cast<int>(box.size()) != dim)
        throw InputError(std::string(what) + " has " + std::to_string(box.size()) + " intervals for dimension " +
                         std::to_string(dim));
    return box;
}

void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
    if (cfg.out.empty()) {
        out << body;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw InputError("cannot write " + cfg.out);
    f << body;
}

int list_metrics(const RunConfig& cfg, std::ostream& out) {
    if (cfg.format == Format::json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& fx : builtin_fixtures()) arr.push_back({{"name", fx.name}, {"dim", fx.domain.dim}, {"text", fx.text}});
        nlohmann::json j = {{"schema_version", kSchemaVersion}, {"kind", "metrics"}, {"metrics", arr}};
        emit(cfg, j.dump(2) + "\n", out);
    } else {
        std::ostringstream s;
        for (const auto& fx : builtin_fixtures()) s << fx.name << "  (n=" << fx.domain.dim << ")\n";
        emit(cfg, s.str(), out);
    }
    return 0;
}

}  // namespace

Command parse_command(const std::string& name) {
    if (name == "tensors") return Command::tensors;
    if (name == "classify") return Command::classify;
    if (name == "verify") return Command::verify;
    if (name == "list-metrics") return Command::list_metrics;
    throw InputError("unknown command: " + name);
}

Format parse_format(const std::string& name) {
    if (name == "json") return Format::json;
    if (name == "text") return Format::text;
    throw InputError("format must be json or text: " + name);
}

std::vector<Interval> parse_box(const std::string& text) {
    std::vector<Interval> box;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("interval must be lo:hi: " + item);
        Interval iv{to_double(trim(item.substr(0, colon)), "interval bound"), to_double(trim(item.substr(colon + 1)), "interval bound")};
        if (!(iv.lo < iv.hi)) throw InputError("empty interval: " + item);
        box.push_back(iv);
    }
    if (box.empty()) throw InputError("empty box");
    return box;
}

void merge_run_config(RunConfig& cfg, const std::string& text, const std::string& base_dir) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto path = [&](const std::string& p) {
            const std::filesystem::path fp(p);
            return fp.is_absolute() ? fp : std::filesystem::path(base_dir) / fp;
        };
        if (key == "spec") {
            const auto p = path(value);
            cfg.spec = std::filesystem::exists(p) ? p.string() : value;
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_double(value, "seed"));
        } else if (key == "count") {
            cfg.count = static_cast<int>(to_double(value, "count"));
        } else if (key == "format") {
            cfg.format = parse_format(value);
        } else if (key == "out") {
            cfg.out = path(value).string();
        } else if (key == "x_box") {
            cfg.x_box = parse_box(value);
        } else if (key == "y_box") {
            cfg.y_box = parse_box(value);
        } else if (key == "eps_y") {
            cfg.eps_y = to_double(value, "eps_y");
        } else if (key == "tolerances") {
            cfg.tolerances.merge_text(read_text(path(value)));
        } else if (key.rfind("tol.", 0) == 0) {
            cfg.tolerances.set(key.substr(4) + "=" + value);
        } else {
            throw InputError("config line " + std::to_string(lineno) + ": unknown key " + key);
        }
    }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == Command::list_metrics) return list_metrics(cfg, out);
        if (cfg.spec.empty()) throw InputError("--spec is required");
        if (cfg.count < 1) throw InputError("count must be at least 1");

        auto [spec, domain] = load_metric(cfg.spec);
        if (cfg.seed) domain.seed = *cfg.seed;
        if (cfg.x_box) domain.x_box = fit_box(*cfg.x_box, spec.dim, "x_box");
        if (cfg.y_box) domain.y_box = fit_box(*cfg.y_box, spec.dim, "y_box");
        if (cfg.eps_y) domain.eps_y = *cfg.eps_y;
        const auto points = sample_points(spec, domain, cfg.count);
        const bool json = cfg.format == Format::json;

        switch (cfg.command) {
        case Command::tensors: {
            const auto frames = compute_frames(spec, points);
            emit(cfg, json ? frames_json(spec, frames).dump(2) + "\n" : frames_text(spec, frames), out);
            return 0;
        }
        case Command::classify: {
            const auto rep = classify_frames(spec, compute_frames(spec, points), cfg.tolerances);
            emit(cfg, json ? classification_json(rep, cfg.tolerances).dump(2) + "\n" : classification_text(rep), out);
            return rep.violations.empty() ? 0 : 1;
        }
        case Command::verify: {
            const auto rep = run_identity_suite(spec, points, cfg.tolerances);
            const auto synthetic = synthetic_algebra_tests(cfg.synthetic_seed);
            const auto j = identity_json(rep, synthetic, cfg.tolerances);
            emit(cfg, json ? j.dump(2) + "\n" : identity_text(rep, synthetic), out);
            return j.at("passed").get<bool>() ? 0 : 1;
        }
        case Command::list_metrics:
            break;
        }
        return 0;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace finsler
