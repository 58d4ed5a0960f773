// cehgen: write the synthetic case-study inputs as a config directory.

#include <iostream>

#include <CLI11.hpp>

#include "ceh/errors.hpp"
#include "ceh/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic hub inputs shaped like the heavy-duty fleet case study"};
    ceh::synthetic::CaseStudyOptions options;
    std::string out;
    app.add_option("--out", out, "Output directory")->required();
    app.add_option("--seed", options.seed, "Generator seed");
    app.add_option("--year", options.year, "Calendar year");
    app.add_option("--weekday-sessions", options.weekday_sessions, "Sessions per weekday scenario")->check(CLI::NonNegativeNumber);
    app.add_option("--weekend-sessions", options.weekend_sessions, "Sessions per weekend scenario")->check(CLI::NonNegativeNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        const auto inputs = ceh::synthetic::case_study(options);
        ceh::ingest::save_inputs(inputs, out);
        std::cout << "wrote " << inputs.scenarios.scenarios.size() << " scenarios, " << inputs.scenarios.session_count()
                  << " sessions to " << out << "\n";
    } catch (const ceh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
