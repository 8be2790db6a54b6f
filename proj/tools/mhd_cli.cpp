#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mhd/app.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mhd::IoError("cannot read config: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const mhd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mhd::kExitValidation;
  } catch (const mhd::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return mhd::kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return mhd::kExitIo;
  } catch (const mhd::BlowupError& e) {
    std::cerr << "numerical blowup: " << e.what() << "\n";
    return mhd::kExitBlowup;
  } catch (const mhd::CflError& e) {
    std::cerr << "numerical blowup: " << e.what() << "\n";
    return mhd::kExitBlowup;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral MHD solver with a background magnetic field"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  auto* run = app.add_subcommand("run", "run the mode selected in a config file");
  run->add_option("--config,-c", config_path, "JSON config")->required();
  run->add_option("--output,-o", output_override, "override output_dir");

  auto* sweep = app.add_subcommand("sweep", "run the Mach-number sweep of a config file");
  sweep->add_option("--config,-c", config_path, "JSON config")->required();
  sweep->add_option("--output,-o", output_override, "override output_dir");

  auto* dump = app.add_subcommand("dump-config", "print the resolved config");
  dump->add_option("--config,-c", config_path, "JSON config")->required();

  std::string verify_dir = "verify_out";
  int verify_n = 16;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--output,-o", verify_dir, "directory for verify.txt and manifest.json");
  verify->add_option("--n", verify_n, "grid size (at most 16 is used)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : mhd::kExitValidation;
  }

  auto load = [&] {
    mhd::RunConfig c = mhd::parse_config(slurp(config_path));
    if (!output_override.empty()) c.output_dir = output_override;
    return c;
  };

  if (*dump) {
    return guarded([&] {
      std::cout << mhd::dump_config(load()).dump(2) << "\n";
      return mhd::kExitOk;
    });
  }
  if (*verify) {
    return guarded([&] {
      mhd::RunConfig c;
      c.mode = mhd::RunMode::Verify;
      c.n = verify_n;
      c.output_dir = verify_dir;
      return mhd::command_run(c, std::cout);
    });
  }
  if (*sweep) {
    return guarded([&] {
      mhd::RunConfig c = load();
      if (c.mode != mhd::RunMode::LimitSweep) {
        c.mode = mhd::RunMode::LimitSweep;
        mhd::config_from_json(mhd::dump_config(c));  // re-validate as a sweep
      }
      return mhd::command_run(c, std::cout);
    });
  }
  return guarded([&] { return mhd::command_run(load(), std::cout); });
}
