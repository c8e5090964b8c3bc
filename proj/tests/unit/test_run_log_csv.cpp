#include "doctest.h"
#include "padbench/run_log.hpp"
#include "padbench/usersim.hpp"

using namespace padbench;

namespace {

const char* kColumns =
    "trial_idx,id_bits,amplitude_px,width_px,mt_ms,error,strokes,keypresses,clicks,previews,cycles,"
    "discards,pointer_travel_px,saved_px";

std::string header() {
  return "#padbench,v1,run_id=r1,condition=trackpad,device=trackpad,profile=none,seed=7\n" +
         std::string(kColumns) + "\n";
}

std::size_t error_line(const std::string& text) {
  try {
    parse_csv(text);
  } catch (const CsvError& e) {
    return e.line();
  }
  return 0;
}

std::string error_text(const std::string& text) {
  try {
    parse_csv(text);
  } catch (const CsvError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("header-only file is an empty log") {
  const auto log = parse_csv(header());
  CHECK(log.records.empty());
  CHECK(log.header.run_id == "r1");
  CHECK(log.header.device == Device::Trackpad);
  CHECK(log.header.seed == 7);
  CHECK(export_csv(log) == header());
}

TEST_CASE("documented layout") {
  RunLog log;
  log.header = {"pad-ideal_5_1", "pad-ideal", Device::Pad, "ideal", 18446744073709551615ULL, 1};
  TrialRecord r;
  r.trial_idx = 1;
  r.id_bits = 5;
  r.amplitude_px = 1550;
  r.width_px = 50;
  r.mt_ms = 1234.56789;
  r.previews = 1;
  r.saved_px = 1526.45;
  log.records.push_back(r);
  const auto text = export_csv(log);
  CHECK(text ==
        "#padbench,v1,run_id=pad-ideal_5_1,condition=pad-ideal,device=pad,profile=ideal,seed=18446744073709551615\n" +
            std::string(kColumns) + "\n1,5,1550,50,1234.57,0,1,0,0,1,0,0,0,1526.45\n");
}

TEST_CASE("property: parse then export is byte-identical on simulated logs") {
  const auto p = default_params();
  for (const auto& cond : {SimCondition::trackpad(4), SimCondition::pad(AccuracyProfile::ideal(), 5),
                           SimCondition::pad(AccuracyProfile::uniform3(), 6)}) {
    for (int run = 1; run <= 20; ++run) {
      const auto text = export_csv(simulate_run(cond, 22, p, 1234, run));
      CHECK(export_csv(parse_csv(text)) == text);
    }
  }
}

TEST_CASE("malformed files are rejected with line numbers") {
  const std::string row = "1,5,1550,50,1000,0,1,0,1,0,0,0,1500,0\n";
  CHECK(error_line("") == 1);
  CHECK(error_line("#padbench,v2,run_id=a,condition=b,device=pad,profile=x,seed=1\n") == 1);
  CHECK(error_line("trial_idx,id_bits\n") == 1);
  CHECK(error_line("#padbench,v1,run_id=a,condition=b,device=mouse,profile=x,seed=1\n" + std::string(kColumns) + "\n") == 1);
  CHECK(error_line("#padbench,v1,run_id=a,condition=b,device=pad,profile=x\n") == 1);
  CHECK(error_line("#padbench,v1,run_id=a,condition=b,device=pad,profile=x,seed=1\n") == 2);
  CHECK(error_line(header() + row + "2,5,1550,50,fast,0,1,0,1,0,0,0,1500,0\n") == 4);
  CHECK(error_line(header() + row + row) == 4);
  CHECK(error_line(header() + "0,5,1550,50,1000,0,1,0,1,0,0,0,1500,0\n") == 3);
  CHECK(error_line(header() + "1,5,1550,50,1000,2,1,0,1,0,0,0,1500,0\n") == 3);
  CHECK(error_line(header() + "1,5,1550,50,1000,0,1,0,1,0,0,0,1500\n") == 3);
  CHECK(error_line(header() + "1,5,1550,50,1000,0,1,0,1,0,0,0,1500,\n") == 3);
  CHECK(error_line(header() + row + "\n") == 4);
  CHECK(error_text(header() + "1,5,1550,50,1000,0,1.5,0,1,0,0,0,1500,0\n").find("strokes") !=
        std::string::npos);
}

TEST_CASE("missing or reordered columns are named") {
  std::string cols = kColumns;
  const auto without_strokes = cols.substr(0, cols.find(",strokes")) + cols.substr(cols.find(",keypresses"));
  const auto text = "#padbench,v1,run_id=a,condition=b,device=pad,profile=x,seed=1\n" + without_strokes + "\n";
  CHECK(error_line(text) == 2);
  CHECK(error_text(text).find("strokes") != std::string::npos);

  std::string swapped = "id_bits,trial_idx" + cols.substr(std::string("trial_idx,id_bits").size());
  CHECK(error_line("#padbench,v1,run_id=a,condition=b,device=pad,profile=x,seed=1\n" + swapped + "\n") == 2);
}

TEST_CASE("export refuses header values that would break the format") {
  RunLog log;
  log.header.run_id = "a,b";
  CHECK_THROWS_AS(export_csv(log), std::invalid_argument);
  log.header.run_id = "ok";
  log.header.condition = "x=y";
  CHECK_THROWS_AS(export_csv(log), std::invalid_argument);
}

TEST_CASE("float formatting keeps six significant digits") {
  CHECK(format_float(1234.56789) == "1234.57");
  CHECK(format_float(5.0) == "5");
  CHECK(format_float(0.000123456789) == "0.000123457");
  CHECK(format_float(1234567.0) == "1.23457e+06");
}

TEST_CASE("device names") {
  CHECK(parse_device("pad") == Device::Pad);
  CHECK(parse_device("trackpad") == Device::Trackpad);
  CHECK_FALSE(parse_device("mouse"));
  CHECK(to_string(Device::Pad) == "pad");
}
