#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "causaltwin/error.hpp"

#include "commands.hpp"
#include "config.hpp"

namespace {

// Exit contract: 0 success, 1 runtime failure (missing or mismatched
// artifacts, data errors), 2 usage or configuration errors.
int exit_code(causaltwin::Errc code) {
  return code == causaltwin::Errc::InvalidArgument ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal digital twin pipeline for industrial sensor streams"};
  app.require_subcommand(1);

  causaltwin::cli::PipelineConfig cfg;
  causaltwin::cli::register_synth(app, cfg);
  causaltwin::cli::register_discover(app, cfg);
  causaltwin::cli::register_fit(app, cfg);
  causaltwin::cli::register_detect(app, cfg);
  causaltwin::cli::register_explain(app, cfg);
  causaltwin::cli::register_whatif(app, cfg);
  causaltwin::cli::register_eval(app, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const causaltwin::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
