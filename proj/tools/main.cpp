#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rational homotopy computations on finite CDGA models"};
  std::vector<std::string> args;
  cdgakit::cli::Options opt;
  std::string format = "human";
  int upto = -1, cutoff = -1;
  app.add_option("args", args, "[task] problem-file (use - for stdin)")->required()->expected(1, 2);
  app.add_option("--upto", upto, "highest degree to report");
  app.add_option("--cutoff", cutoff, "truncation degree of the models");
  app.add_option("--format", format, "human or machine")->check(CLI::IsMember({"human", "machine"}));
  app.add_flag("--verify", opt.verify, "re-run independent oracles");
  CLI11_PARSE(app, argc, argv);

  if (upto >= 0) opt.upto = upto;
  if (cutoff >= 0) opt.cutoff = cutoff;
  opt.machine = format == "machine";
  if (args.size() == 2) opt.task = args[0];
  const std::string& path = args.back();

  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "error: cannot open " << path << "\n";
      return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const auto out = cdgakit::cli::run_text(text, opt);
  (out.exit_code == 2 && !opt.machine ? std::cerr : std::cout) << cdgakit::cli::render(out, opt.machine);
  return out.exit_code;
}
