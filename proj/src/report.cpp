#include "relfacts/report.hpp"

#include <algorithm>
#include <cstdio>

#include "relfacts/scenario.hpp"

namespace relfacts::scn {

namespace {

std::string json_escape(const std::string& raw) {
    std::string out;
    out.reserve(raw.size() + 2);
    for (unsigned char c : raw) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out;
}

std::string q(const std::string& raw) { return "\"" + json_escape(raw) + "\""; }

const char* status_name(CrossCheckStatus status) {
    switch (status) {
        case CrossCheckStatus::kAgree: return "agree";
        case CrossCheckStatus::kDisagree: return "disagree";
        case CrossCheckStatus::kInformationDestroyed: return "information-destroyed";
    }
    return "unknown";
}

struct BasisEntry {
    std::vector<std::size_t> digits;
    Complex value;   // amplitude (pure) or diagonal entry (mixed)
    double weight;   // Born weight of the basis state
    std::size_t flat;
};

std::vector<std::size_t> digits_of(std::size_t flat, const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> digits(dims.size(), 0);
    for (std::size_t j = dims.size(); j-- > 0;) {
        digits[j] = flat % dims[j];
        flat /= dims[j];
    }
    return digits;
}

std::vector<BasisEntry> top_entries(const State& state, std::size_t limit) {
    const std::vector<std::size_t> dims = state.registry().dims();
    std::vector<BasisEntry> entries;
    if (state.is_pure()) {
        const CVector& psi = state.ket();
        for (std::size_t i = 0; i < psi.dim(); ++i) {
            const double w = std::norm(psi.at(i));
            if (w > 1e-12) entries.push_back({digits_of(i, dims), psi.at(i), w, i});
        }
    } else {
        const CMatrix& rho = state.rho();
        for (std::size_t i = 0; i < rho.rows(); ++i) {
            const double w = rho.at(i, i).real();
            if (w > 1e-12) entries.push_back({digits_of(i, dims), rho.at(i, i), w, i});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const BasisEntry& a, const BasisEntry& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.flat < b.flat;
    });
    if (entries.size() > limit) entries.resize(limit);
    return entries;
}

std::string render_json(const ScenarioResult& result) {
    std::string out;
    out += "{\n";
    out += "  \"schema_version\": " + std::to_string(kReportSchemaVersion) + ",\n";
    out += "  \"scenario\": " + q(result.name) + ",\n";
    out += "  \"seed\": " + std::to_string(result.seed) + ",\n";
    out += "  \"threshold\": " + format_double(result.threshold) + ",\n";
    out += "  \"observers\": [";
    bool first_observer = true;
    for (const PerspectiveLedger& ledger : result.ledgers) {
        out += first_observer ? "\n" : ",\n";
        first_observer = false;
        out += "    {\n";
        out += "      \"observer\": " + q(ledger.observer()) + ",\n";

        const State& state = ledger.state();
        out += "      \"state\": {\"kind\": ";
        out += state.is_pure() ? "\"pure\"" : "\"mixed\"";
        out += ", \"systems\": [";
        for (std::size_t i = 0; i < state.registry().size(); ++i) {
            if (i != 0) out += ", ";
            out += "{\"label\": " + q(state.registry().label(i)) +
                   ", \"dim\": " + std::to_string(state.registry().dim(i)) + "}";
        }
        out += "], \"purity\": " + format_double(state.purity()) + ", \"top\": [";
        const std::vector<BasisEntry> top = top_entries(state, 8);
        for (std::size_t i = 0; i < top.size(); ++i) {
            if (i != 0) out += ", ";
            out += "{\"basis\": [";
            for (std::size_t j = 0; j < top[i].digits.size(); ++j) {
                if (j != 0) out += ", ";
                out += std::to_string(top[i].digits[j]);
            }
            out += "], \"re\": " + format_double(top[i].value.real()) +
                   ", \"im\": " + format_double(top[i].value.imag()) +
                   ", \"weight\": " + format_double(top[i].weight) + "}";
        }
        out += "]},\n";

        out += "      \"facts\": [";
        bool first = true;
        for (const FactRecord& fact : ledger.facts()) {
            out += first ? "" : ", ";
            first = false;
            out += "{\"step\": " + std::to_string(fact.step) + ", \"system\": " + q(fact.system) +
                   ", \"observable\": " + q(fact.observable) + ", \"outcome\": " + q(fact.outcome) +
                   ", \"eigenvalue\": " + format_double(fact.eigenvalue) +
                   ", \"probability\": " + format_double(fact.probability) + "}";
        }
        out += "],\n";

        out += "      \"stability\": [";
        first = true;
        for (const StabilityEntry& entry : result.stability_checks) {
            if (entry.observer != ledger.observer()) continue;
            out += first ? "" : ", ";
            first = false;
            out += "{\"step\": " + std::to_string(entry.step_index) +
                   ", \"partition\": " + q(entry.partition) + ", \"target\": " + q(entry.target) +
                   ", \"p_direct\": " + format_double(entry.report.p_direct) +
                   ", \"p_composed\": " + format_double(entry.report.p_composed) +
                   ", \"deviation\": " + format_double(entry.report.deviation) +
                   ", \"stable\": " + (entry.report.stable ? "true" : "false") +
                   ", \"witness\": " + format_double(entry.witness) + "}";
        }
        out += "],\n";

        out += "      \"cross_checks\": [";
        first = true;
        for (const CrossCheckEntry& entry : result.cross_checks) {
            if (entry.observer != ledger.observer()) continue;
            out += first ? "" : ", ";
            first = false;
            out += "{\"step\": " + std::to_string(entry.step_index) +
                   ", \"against\": " + q(entry.friend_observer) +
                   ", \"status\": " + q(status_name(entry.status)) +
                   ", \"outcome\": " + q(entry.observer_outcome) +
                   ", \"friend_outcome\": " + q(entry.friend_outcome) +
                   ", \"probability\": " + format_double(entry.probability) +
                   ", \"exact_correlation\": " + format_double(entry.exact_correlation) + "}";
        }
        out += "]\n";
        out += "    }";
    }
    out += "\n  ]\n}\n";
    return out;
}

std::string render_csv(const ScenarioResult& result) {
    std::string out = "observer,step,system,observable,outcome,eigenvalue,probability\n";
    for (const PerspectiveLedger& ledger : result.ledgers) {
        for (const FactRecord& fact : ledger.facts()) {
            out += ledger.observer() + "," + std::to_string(fact.step) + "," + fact.system + "," +
                   fact.observable + "," + fact.outcome + "," + format_double(fact.eigenvalue) +
                   "," + format_double(fact.probability) + "\n";
        }
    }
    return out;
}

std::string render_text(const ScenarioResult& result) {
    std::string out;
    out += "scenario: " + (result.name.empty() ? "(unnamed)" : result.name) + "\n";
    out += "seed: " + std::to_string(result.seed) + "\n";
    out += "stability threshold: " + format_double(result.threshold) + "\n";
    for (const PerspectiveLedger& ledger : result.ledgers) {
        const State& state = ledger.state();
        out += "observer " + ledger.observer() + "\n";
        out += std::string("  state: ") + (state.is_pure() ? "pure" : "mixed") + ", systems";
        for (std::size_t i = 0; i < state.registry().size(); ++i) {
            out += (i == 0 ? " " : " ⊗ ") + state.registry().label(i) + "(" +
                   std::to_string(state.registry().dim(i)) + ")";
        }
        out += ", purity " + format_double(state.purity()) + "\n";
        for (const BasisEntry& entry : top_entries(state, 8)) {
            out += "    |";
            for (std::size_t j = 0; j < entry.digits.size(); ++j) {
                if (j != 0) out += ",";
                out += std::to_string(entry.digits[j]);
            }
            out += "> " + format_complex(entry.value) + " (weight " +
                   format_double(entry.weight) + ")\n";
        }
        if (ledger.facts().empty()) {
            out += "  facts: none\n";
        }
        for (const FactRecord& fact : ledger.facts()) {
            out += "  fact[" + std::to_string(fact.step) + "]: " + fact.observable + " on " +
                   fact.system + " -> " + fact.outcome + " (eigenvalue " +
                   format_double(fact.eigenvalue) + ", p " + format_double(fact.probability) +
                   ")\n";
        }
        for (const StabilityEntry& entry : result.stability_checks) {
            if (entry.observer != ledger.observer()) continue;
            out += "  stability[" + std::to_string(entry.step_index) + "]: partition " +
                   entry.partition + ", target " + entry.target + ": p_direct " +
                   format_double(entry.report.p_direct) + ", p_composed " +
                   format_double(entry.report.p_composed) + ", deviation " +
                   format_double(entry.report.deviation) + ", " +
                   (entry.report.stable ? "stable" : "not stable") + ", interference witness " +
                   format_double(entry.witness) + "\n";
        }
        for (const CrossCheckEntry& entry : result.cross_checks) {
            if (entry.observer != ledger.observer()) continue;
            out += "  cross-check[" + std::to_string(entry.step_index) + "] against " +
                   entry.friend_observer + ": " + status_name(entry.status);
            if (!entry.observer_outcome.empty()) {
                out += ", outcome " + entry.observer_outcome + " (friend recorded " +
                       entry.friend_outcome + "), p " + format_double(entry.probability);
            }
            out += ", exact correlation " + format_double(entry.exact_correlation) + "\n";
        }
    }
    return out;
}

}  // namespace

std::string render_report(const ScenarioResult& result, ReportFormat format) {
    switch (format) {
        case ReportFormat::kJson: return render_json(result);
        case ReportFormat::kCsv: return render_csv(result);
        case ReportFormat::kText: return render_text(result);
    }
    return {};
}

}  // namespace relfacts::scn
