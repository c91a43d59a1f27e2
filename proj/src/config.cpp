#include "mailbot/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mailbot/rules.hpp"

namespace mailbot {

namespace {

using nlohmann::json;

std::string require_string(const json& j, const char* key) {
  if (!j.is_string())
    throw ConfigSemantic(std::string("config field '") + key + "' must be a string");
  return j.get<std::string>();
}

long require_int(const json& j, const char* key) {
  if (!j.is_number_integer())
    throw ConfigSemantic(std::string("config field '") + key + "' must be an integer");
  return j.get<long>();
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigSyntax(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigSyntax("config must be a JSON object");

  AppConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "server") {
      cfg.store.server = require_string(value, "server");
      if (cfg.store.server.empty()) throw ConfigSemantic("server must not be empty");
    } else if (key == "port") {
      const long port = require_int(value, "port");
      if (port <= 0 || port > 65535)
        throw ConfigSemantic("port must be in 1..65535, got " + std::to_string(port));
      cfg.store.port = static_cast<int>(port);
    } else if (key == "mail_folder") {
      cfg.store.mail_folder = require_string(value, "mail_folder");
      if (cfg.store.mail_folder.empty())
        throw ConfigSemantic("mail_folder must not be empty");
    } else if (key == "timeout_ms") {
      const long t = require_int(value, "timeout_ms");
      if (t <= 0) throw ConfigSemantic("timeout_ms must be positive");
      cfg.store.timeout_ms = static_cast<int>(t);
    } else if (key == "top") {
      const long top = require_int(value, "top");
      if (top < 0) throw ConfigSemantic("top must be non-negative");
      cfg.store.top = static_cast<std::size_t>(top);
    } else if (key == "fixture") {
      cfg.store.fixture_root = require_string(value, "fixture");
      cfg.store.mode = StoreMode::fixture;
    } else if (key == "trace") {
      cfg.store.trace_path = require_string(value, "trace");
    } else if (key == "plaintext_loopback") {
      if (!value.is_boolean())
        throw ConfigSemantic("plaintext_loopback must be a boolean");
      if (value.get<bool>()) cfg.store.mode = StoreMode::loopback_plain;
    } else if (key == "rules") {
      cfg.rules_path = require_string(value, "rules");
    } else if (key == "blocklist") {
      cfg.blocklist_path = require_string(value, "blocklist");
    } else if (key == "layout_root") {
      cfg.layout_root = require_string(value, "layout_root");
    } else if (key == "report_dir") {
      cfg.report_dir = require_string(value, "report_dir");
    } else if (key == "rename_template") {
      if (!value.is_object()) throw ConfigSemantic("rename_template must be an object");
      if (value.contains("pattern"))
        cfg.rename_template.pattern = require_string(value["pattern"], "pattern");
      if (value.contains("separator"))
        cfg.rename_template.separator = require_string(value["separator"], "separator");
      if (cfg.rename_template.pattern.empty())
        throw ConfigSemantic("rename_template.pattern must not be empty");
    } else if (key == "highest_qualification") {
      cfg.highest_qualification = require_string(value, "highest_qualification");
    } else if (key == "run_mode") {
      const std::string mode = require_string(value, "run_mode");
      if (mode == "dry_run")
        cfg.run_mode = RunMode::dry_run;
      else if (mode == "execute")
        cfg.run_mode = RunMode::execute;
      else
        throw ConfigSemantic("run_mode must be \"dry_run\" or \"execute\"");
    } else if (key == "manifest") {
      cfg.manifest_path = require_string(value, "manifest");
    } else if (key == "credentials_file") {
      cfg.credentials_path = require_string(value, "credentials_file");
    } else if (key == "invitation") {
      if (!value.is_object()) throw ConfigSemantic("invitation must be an object");
      if (value.contains("from"))
        cfg.invitation_from = require_string(value["from"], "invitation.from");
      if (value.contains("subject"))
        cfg.invitation_subject = require_string(value["subject"], "invitation.subject");
      if (value.contains("body"))
        cfg.invitation_body = require_string(value["body"], "invitation.body");
    } else if (key == "baseline_seconds_per_email") {
      if (!value.is_number())
        throw ConfigSemantic("baseline_seconds_per_email must be a number");
      cfg.baseline_seconds_per_email = value.get<double>();
      if (cfg.baseline_seconds_per_email < 0)
        throw ConfigSemantic("baseline_seconds_per_email must be non-negative");
    } else if (key == "save_not_useful") {
      if (!value.is_boolean()) throw ConfigSemantic("save_not_useful must be a boolean");
      cfg.save_not_useful = value.get<bool>();
    } else {
      throw ConfigSemantic("unknown config field '" + key + "'");
    }
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigSyntax("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace mailbot
