// Command-line front end: solve, reduce, newton, factor, classify, purity,
// xi and verify-paper. Exit codes: 0 success, 1 other failure, 2 parse
// error, 3 precision error, 4 unsupported splitting, 5 no relation found.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mahler/examples.hpp"
#include "mahler/growth.hpp"
#include "mahler/io.hpp"
#include "mahler/reduction.hpp"

using namespace mahler;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kParse = 2, kPrecision = 3, kSplitting = 4, kNoRelation = 5 };

struct Job {
    std::string expr, file;
    long p = 0;  // 0: from the input, else 2
    std::string precision = "16";
    std::string window;
    int max_order = 3, max_degree = 4;
    std::string format = "text";
    // classify / purity
    std::string op_text;
    int basis_index = -1;
    // xi
    std::string action = "standardize";
    long shift = 1;
    std::string other;
    int alpha = 0;
    std::string c = "1";
};

std::string read_input(const Job& job) {
    if (!job.expr.empty()) return job.expr;
    if (job.file.empty()) raise(ErrorKind::ParseError, "no input: give --expr or an input file");
    std::ifstream in(job.file);
    if (!in) raise(ErrorKind::ParseError, "cannot read input file " + job.file);
    std::stringstream ss;
    std::string line;
    // '#' starts a comment line.
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t") != std::string::npos && line[line.find_first_not_of(" \t")] != '#')
            ss << line << ' ';
    return ss.str();
}

long radix(const Job& job) { return job.p > 0 ? job.p : 2; }

Rational precision_of(const Job& job) {
    Rational n = parse_rational(job.precision);
    if (n <= 0) raise(ErrorKind::ParseError, "precision must be positive");
    return n;
}

MahlerOperator operator_input(const Job& job, const std::string& text) {
    MahlerOperator l = parse_operator(text, radix(job));
    if (job.p > 0 && l.p() != job.p) raise(ErrorKind::ParseError, "--p disagrees with the operator's \"@ p=\"");
    return l;
}

void require_format(const Job& job, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed)
        if (job.format == f) return;
    raise(ErrorKind::InvalidArgument, "format '" + job.format + "' is not available for this command");
}

void print_json(const std::string& kind, Json payload) { std::cout << json_document(kind, std::move(payload)).dump(2) << "\n"; }

void print_matrix(const std::string& name, const std::vector<std::vector<std::string>>& rows) {
    std::cout << name << " =\n";
    for (const auto& r : rows) {
        std::cout << "  [";
        for (std::size_t j = 0; j < r.size(); ++j) std::cout << (j ? ", " : "") << r[j];
        std::cout << "]\n";
    }
}

template <class T, class F>
std::vector<std::vector<std::string>> cells(const Matrix<T>& m, F&& f) {
    std::vector<std::vector<std::string>> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i].push_back(f(m(i, j)));
    return out;
}

std::string residual_text(const ResidualReport& r) {
    std::string s = r.zero ? "zero" : "NONZERO (" + r.first_nonzero + ")";
    s += r.precision ? " below z^" + to_string(*r.precision) : " exactly";
    return s + ", " + std::to_string(r.terms_checked) + " coefficients checked";
}

// ---------------------------------------------------------------- commands

int cmd_solve(const Job& job) {
    require_format(job, {"text", "json"});
    MahlerOperator l = operator_input(job, read_input(job));
    Rational n = precision_of(job);
    auto basis = solution_basis(l, n);
    if (job.format == "json") {
        Json b = Json::array();
        for (const auto& g : basis) b.push_back(to_json(g));
        print_json("solve", Json{{"operator", to_json(l)}, {"precision", to_json(n)}, {"basis", b}});
        return kOk;
    }
    std::cout << "operator: " << l.to_string() << "\n";
    std::cout << "basis of solutions (series known below z^" << to_string(n) << "):\n";
    for (std::size_t i = 0; i < basis.size(); ++i) std::cout << "  [" << i << "] " << to_compact_string(basis[i]) << "\n";
    return kOk;
}

int cmd_reduce(const Job& job) {
    require_format(job, {"text", "json"});
    MahlerOperator l = operator_input(job, read_input(job));
    ReductionResult r = reduce_to_constant(l, precision_of(job));
    if (job.format == "json") {
        print_json("reduce", to_json(r));
        return r.residual.zero ? kOk : kPrecision;
    }
    std::cout << "operator: " << l.to_string() << "\n";
    std::cout << "field: " << (r.field ? r.field->describe() : std::string("Q")) << "\n";
    std::cout << "blocks:";
    for (std::size_t i = 0; i < r.blocks.size(); ++i)
        std::cout << " " << r.blocks[i] << " (z-shift " << to_string(r.block_slopes[i]) << ")";
    std::cout << "\n";
    print_matrix("C", cells(r.C, [](const Alg& x) { return x.to_string(); }));
    print_matrix("F2", cells(r.F2, [](const XiExpr& x) { return to_compact_string(x); }));
    print_matrix("Theta", cells(r.Theta, [](const Puiseux& x) { return x.to_string(); }));
    print_matrix("F1", cells(r.F1, [](const Puiseux& x) { return x.to_string(); }));
    std::cout << "residual: " << residual_text(r.residual) << "\n";
    return r.residual.zero ? kOk : kPrecision;
}

int cmd_newton(const Job& job) {
    require_format(job, {"text", "json"});
    MahlerOperator l = operator_input(job, read_input(job));
    NewtonData d = newton_polygon(l);
    if (job.format == "json") {
        print_json("newton", Json{{"operator", to_json(l)}, {"polygon", to_json(d)}});
        return kOk;
    }
    std::cout << "vertices (p^i, val a_i):";
    for (const auto& [x, y] : d.vertices) std::cout << " (" << to_string(x) << ", " << to_string(y) << ")";
    std::cout << "\n";
    for (const auto& e : d.edges) {
        std::cout << "slope " << to_string(e.slope) << ", indices " << e.start << ".." << e.end << ", exponents:";
        for (const auto& c : e.exponents) std::cout << " " << c.to_string();
        std::cout << "\n";
    }
    return kOk;
}

int cmd_factor(const Job& job) {
    require_format(job, {"text", "json"});
    MahlerOperator l = operator_input(job, read_input(job));
    Factorization f = factor_by_slopes(l, precision_of(job));
    if (job.format == "json") {
        print_json("factor", Json{{"operator", to_json(l)}, {"factorization", to_json(f)}});
        return kOk;
    }
    std::cout << "field: " << (f.field ? f.field->describe() : std::string("Q")) << "\n";
    std::cout << "unit: " << f.unit.to_string() << "\n";
    std::cout << "factors (rightmost first), each (z^nu M - c) h^-1:\n";
    Rational scale(1);
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
        const auto& x = f.factors[i];
        std::cout << "  L" << i + 1 << ": nu = " << to_string(x.nu) << ", Newton slope = " << to_string(x.slope / scale)
                  << ", c = " << x.c.to_string() << ", h = " << x.h.to_string() << "\n";
        scale *= x.p;
    }
    std::cout << "achieved precision: " << to_string(f.achieved_precision) << "\n";
    return kOk;
}

// Series input of classify/purity: a literal, or a basis element of an operator.
struct SeriesInput {
    GeneralizedSeries g;
    std::optional<MahlerOperator> op;
    std::optional<Puiseux> plain;
};

SeriesInput series_input(const Job& job) {
    SeriesInput in;
    const long p = radix(job);
    if (!job.op_text.empty() && job.basis_index >= 0) {
        in.op = operator_input(job, job.op_text);
        auto basis = solution_basis(*in.op, precision_of(job));
        if (job.basis_index >= static_cast<int>(basis.size()))
            raise(ErrorKind::InvalidArgument, "basis index out of range (basis has " + std::to_string(basis.size()) +
                                                  " elements)");
        in.g = basis[static_cast<std::size_t>(job.basis_index)];
    } else {
        if (!job.op_text.empty()) in.op = operator_input(job, job.op_text);
        in.g = parse_generalized_series(read_input(job), p);
    }
    if (in.g.terms().size() == 1) {
        const auto& [key, x] = *in.g.terms().begin();
        if (key.c.is_one() && key.j == 0 && x.terms().size() == 1 && x.terms().begin()->first.empty())
            in.plain = x.terms().begin()->second;
    }
    return in;
}

Rational sample_bound(const GeneralizedSeries& g, const Rational& fallback) {
    auto prec = g.precision();
    return prec ? *prec : fallback;
}

int cmd_classify(const Job& job) {
    require_format(job, {"text", "json", "tsv-plot"});
    SeriesInput in = series_input(job);
    const long p = radix(job);
    const Rational hi = sample_bound(in.g, precision_of(job));
    if (job.format == "tsv-plot") {
        std::cout << "where\tgamma\theight\tlog_H\n";
        for (const auto& part : coefficient_heights(in.g, p, Rational(0), hi))
            for (const auto& s : part.samples)
                std::cout << part.where << "\t" << to_string(s.gamma) << "\t" << static_cast<double>(s.height) << "\t"
                          << static_cast<double>(s.log_H) << "\n";
        return kOk;
    }
    GrowthClass cls = classify_series(in.g, p, hi);
    std::optional<DenominatorReport> den;
    std::optional<GrowthClass> certified;
    std::string den_note;
    try {
        if (in.op)
            den = denominator_from_operator(*in.op);
        else if (in.plain && in.plain->is_exact())
            den_note = "exact input with finite support: no denominator to compute";
        else if (in.plain)
            den = mahler_denominator_candidate(*in.plain, p, job.max_order, job.max_degree);
        else
            den_note = "denominator needs a plain series or --operator";
        if (den && !den->zero_ideal) certified = classify_by_roots(*den, p);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoRelationFound) throw;
        den_note = e.what();
    }
    if (job.format == "json") {
        Json j{{"class", to_string(cls.label)}, {"mode", cls.mode}, {"empirical", to_json(cls)}};
        j["denominator"] = den ? to_json(*den) : Json(nullptr);
        j["certified"] = certified ? to_json(*certified) : Json(nullptr);
        j["basis_classes"] = Json::array();
        Json warnings = Json::array();
        for (const auto& n : cls.notes) warnings.push_back(n);
        if (!den_note.empty()) warnings.push_back(den_note);
        j["warnings"] = warnings;
        print_json("classify", j);
        return kOk;
    }
    std::cout << "class: " << to_string(cls.label) << " (" << cls.mode << ")\n";
    std::cout << "evidence: " << cls.evidence << "\n";
    for (const auto& n : cls.notes) std::cout << "note: " << n << "\n";
    if (den) {
        std::cout << "denominator candidate: ";
        if (den->zero_ideal)
            std::cout << "zero ideal (" << den->provenance << ")\n";
        else
            std::cout << to_string_in_z(den->candidate) << " (" << den->provenance << ")\n";
        for (const auto& r : den->roots)
            std::cout << "  root " << r.root.to_string() << " (multiplicity " << r.multiplicity << ")"
                      << (r.unity_order ? ", root of unity of order " + std::to_string(*r.unity_order) : "") << "\n";
    }
    if (certified)
        std::cout << "class from denominator roots (for this annihilating operator): " << to_string(certified->label)
                  << "\n";
    if (!den_note.empty()) std::cout << "note: " << den_note << "\n";
    return kOk;
}

int cmd_purity(const Job& job) {
    require_format(job, {"text", "json"});
    Job series_job = job;
    std::optional<MahlerOperator> supplied;
    if (!job.op_text.empty() && job.basis_index < 0) {
        supplied = operator_input(job, job.op_text);
        series_job.op_text.clear();
    }
    SeriesInput in = series_input(series_job);
    if (in.op) supplied = in.op;
    PurityOptions opt;
    opt.max_order = job.max_order;
    opt.max_degree = job.max_degree;
    opt.precision = sample_bound(in.g, precision_of(job));
    PurityReport rep = purity_report(in.g, radix(job), opt, supplied);
    DenominatorReport den = denominator_from_operator(rep.op);
    if (job.format == "json") {
        Json j = to_json(rep);
        j["mode"] = rep.input_class.mode;
        j["denominator"] = to_json(den);
        print_json("purity", j);
        return kOk;
    }
    std::cout << "input class: " << to_string(rep.input_class.label) << " (" << rep.input_class.mode << ")\n";
    std::cout << "pullback: nu = " << rep.nu << ", k = " << rep.k << "\n";
    std::cout << "operator" << (rep.op_guessed ? " (guessed)" : "") << ": " << rep.op.to_string() << "\n";
    for (std::size_t i = 0; i < rep.basis.size(); ++i)
        std::cout << "  [" << i << "] class " << to_string(rep.basis_classes[i].label) << ": "
                  << to_compact_string(rep.basis[i]).substr(0, 160) << "\n";
    for (int r = 1; r <= 5; ++r)
        std::cout << "C" << r << ": " << (rep.agree[static_cast<std::size_t>(r)] ? "consistent" : "PURITY VIOLATION")
                  << "\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    return kOk;
}

std::pair<Rational, Rational> window_of(const Job& job, const XiIndex& w, long p) {
    if (job.window.empty()) return {Rational(-w.a_sum() - 1), Rational(-p_power(p, -8))};
    auto comma = job.window.find(',');
    if (comma == std::string::npos) raise(ErrorKind::ParseError, "--window expects L,eps");
    Rational lo = parse_rational(job.window.substr(0, comma));
    Rational eps = parse_rational(job.window.substr(comma + 1));
    if (eps <= 0) raise(ErrorKind::ParseError, "window cutoff eps must be positive");
    return {lo, Rational(-eps)};
}

XiIndex single_index(const XiExpr& x) {
    if (x.terms().size() != 1 || !(x.terms().begin()->second == Puiseux(1)))
        raise(ErrorKind::ParseError, "this action expects a single xi[...] term");
    return x.terms().begin()->first;
}

int cmd_xi(const Job& job) {
    require_format(job, {"text", "json"});
    const long p = radix(job);
    XiExpr x = parse_xi_expr(read_input(job), p);
    auto emit = [&](const XiExpr& r) {
        if (job.format == "json")
            print_json("xi", Json{{"action", job.action}, {"p", p}, {"expr", to_json(r)}, {"text", to_compact_string(r)}});
        else
            std::cout << to_compact_string(r) << "\n";
        return kOk;
    };
    if (job.action == "standardize") return emit(standardize(x, p));
    if (job.action == "shift") return emit(standardize(sigma(x, job.shift, p), p));
    if (job.action == "multiply") return emit(standardize(xi_multiply(x, parse_xi_expr(job.other, p), p), p));
    if (job.action == "sum") return emit(standardize(xi_sigma_inverse_sum(job.alpha, parse_algebraic(job.c), x, p), p));
    if (job.action == "annihilator") {
        MahlerOperator l = xi_annihilator(single_index(x), p);
        if (job.format == "json")
            print_json("xi", Json{{"action", job.action}, {"p", p}, {"operator", to_json(l)}});
        else
            std::cout << l.to_string() << "\n";
        return kOk;
    }
    if (job.action == "expand") {
        XiIndex w = single_index(x);
        auto [lo, hi] = window_of(job, w, p);
        TruncatedHahn h = xi_expand(w, hi, p, lo);
        if (job.format == "json") {
            Json terms = Json::array();
            for (const auto& [e, c] : h.terms) terms.push_back(Json::array({to_json(e), to_json(c)}));
            print_json("xi", Json{{"action", job.action}, {"p", p}, {"lower", to_json(h.lower)},
                                  {"upper", to_json(h.upper)}, {"complete", h.complete}, {"terms", terms}});
        } else {
            std::cout << h.to_string() << "\n";
            std::cout << "# window [" << to_string(h.lower) << ", " << to_string(h.upper) << "]"
                      << (h.complete ? ", complete" : ", depth-limited") << "\n";
        }
        return kOk;
    }
    raise(ErrorKind::ParseError, "unknown xi action '" + job.action + "'");
}

int cmd_verify(const Job& job) {
    require_format(job, {"text", "json"});
    auto checks = run_regression_pack();
    bool all = true;
    for (const auto& c : checks) all = all && c.passed;
    if (job.format == "json") {
        Json rows = Json::array();
        for (const auto& c : checks) rows.push_back(Json{{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        print_json("verify-paper", Json{{"passed", all}, {"checks", rows}});
    } else {
        for (const auto& c : checks) std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  [" << c.detail << "]\n";
        std::cout << (all ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
    }
    return all ? kOk : kFailure;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError: return kParse;
        case ErrorKind::PrecisionLoss:
        case ErrorKind::InsufficientData: return kPrecision;
        case ErrorKind::UnsupportedSplitting: return kSplitting;
        case ErrorKind::NoRelationFound: return kNoRelation;
        default: return kFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact computations with p-Mahler equations"};
    app.require_subcommand(1);
    Job job;

    auto common = [&](CLI::App* sub, bool with_precision) {
        sub->add_option("input", job.file, "Input file (the expression, '#' comment lines allowed)");
        sub->add_option("--expr,-e", job.expr, "Inline expression");
        sub->add_option("--p", job.p, "Radix p >= 2 (operators may carry '@ p=N' instead)")
            ->check(CLI::Range(2L, 1000000L));
        sub->add_option("--format", job.format, "Output format")
            ->check(CLI::IsMember({"text", "json", "tsv-plot"}));
        if (with_precision) sub->add_option("--precision,-N", job.precision, "Series precision N (exponent bound)");
    };
    auto guess_bounds = [&](CLI::App* sub) {
        sub->add_option("--max-order", job.max_order, "Guessing bound on the operator order")->check(CLI::PositiveNumber);
        sub->add_option("--max-degree", job.max_degree, "Guessing bound on coefficient degrees")
            ->check(CLI::PositiveNumber);
    };

    auto* solve = app.add_subcommand("solve", "Basis of generalized series solutions of an operator");
    common(solve, true);
    auto* reduce = app.add_subcommand("reduce", "Gauge reduction of the companion system to constant form");
    common(reduce, true);
    auto* newton = app.add_subcommand("newton", "Newton polygon, slopes and exponents");
    common(newton, false);
    auto* factor = app.add_subcommand("factor", "Factorization into first-order factors by slopes");
    common(factor, true);
    auto* classify = app.add_subcommand("classify", "Growth class of the coefficient heights of a series");
    common(classify, true);
    guess_bounds(classify);
    auto* purity = app.add_subcommand("purity", "Compare growth classes across a solution basis");
    common(purity, true);
    guess_bounds(purity);
    for (auto* sub : {classify, purity}) {
        sub->add_option("--operator", job.op_text, "Annihilating operator (supplied, or source of --basis-index)");
        sub->add_option("--basis-index", job.basis_index, "Use this element of the operator's solution basis");
    }
    auto* xi = app.add_subcommand("xi", "Rewrite xi expressions");
    xi->add_option("action", job.action, "standardize | expand | shift | multiply | sum | annihilator")
        ->check(CLI::IsMember({"standardize", "expand", "shift", "multiply", "sum", "annihilator"}));
    common(xi, false);
    xi->add_option("--window", job.window, "Expansion window L,eps: exponents in [L, -eps]");
    xi->add_option("--j", job.shift, "Power of sigma for 'shift'");
    xi->add_option("--with", job.other, "Second factor for 'multiply'");
    xi->add_option("--alpha", job.alpha, "k^alpha weight for 'sum'")->check(CLI::NonNegativeNumber);
    xi->add_option("--c", job.c, "c^k weight for 'sum'");
    auto* verify = app.add_subcommand("verify-paper", "Run the built-in regression pack");
    verify->add_option("--format", job.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParse;
    }

    try {
        if (*solve) return cmd_solve(job);
        if (*reduce) return cmd_reduce(job);
        if (*newton) return cmd_newton(job);
        if (*factor) return cmd_factor(job);
        if (*classify) return cmd_classify(job);
        if (*purity) return cmd_purity(job);
        if (*xi) return cmd_xi(job);
        if (*verify) return cmd_verify(job);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
