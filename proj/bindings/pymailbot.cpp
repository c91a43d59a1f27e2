#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mailbot/audit.hpp"
#include "mailbot/config.hpp"
#include "mailbot/encoding.hpp"
#include "mailbot/message.hpp"
#include "mailbot/normalize.hpp"
#include "mailbot/pipeline.hpp"
#include "mailbot/rules.hpp"
#include "mailbot/run.hpp"

namespace py = pybind11;

namespace {

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

std::span<const std::uint8_t> as_span(const py::bytes& data) {
  char* buf = nullptr;
  Py_ssize_t len = 0;
  if (PyBytes_AsStringAndSize(data.ptr(), &buf, &len) != 0) throw py::error_already_set();
  return {reinterpret_cast<const std::uint8_t*>(buf), static_cast<std::size_t>(len)};
}

py::dict decision_to_dict(const mailbot::Decision& d) {
  py::dict out;
  out["kind"] = mailbot::to_string(d.kind);
  out["reason"] = mailbot::to_string(d.reason);
  if (d.label) out["label"] = *d.label;
  if (d.matched_keyword) out["matched_keyword"] = *d.matched_keyword;
  if (d.matched_rule_priority) out["matched_rule_priority"] = *d.matched_rule_priority;
  return out;
}

}  // namespace

PYBIND11_MODULE(_mailbot, m) {
  m.doc() = "rule-based e-mail triage core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<mailbot::ConfigSyntax>(m, "ConfigSyntax", PyExc_ValueError);
  py::register_exception<mailbot::ConfigSemantic>(m, "ConfigSemantic", PyExc_ValueError);
  py::register_exception<mailbot::MalformedMessage>(m, "MalformedMessageError",
                                                    PyExc_ValueError);
  py::register_exception<mailbot::CorruptEncoding>(m, "CorruptEncodingError",
                                                   PyExc_ValueError);
  py::register_exception<mailbot::StoreError>(m, "StoreError", PyExc_RuntimeError);

  m.def(
      "run",
      [](const std::string& config_json, bool execute) {
        mailbot::AppConfig cfg = mailbot::parse_config(config_json);
        if (execute) cfg.run_mode = mailbot::RunMode::execute;
        mailbot::Credentials creds;
        try {
          creds = mailbot::resolve_credentials(cfg, /*allow_prompt=*/false);
        } catch (const mailbot::NoCredentials&) {
          if (cfg.store.mode != mailbot::StoreMode::fixture) throw;
        }
        const mailbot::RunReport report = mailbot::run_pipeline(cfg, creds);
        return json_loads(mailbot::to_json(report).dump());
      },
      py::arg("config_json"), py::arg("execute") = false,
      "Runs the triage pipeline from a JSON config document; returns the run "
      "report as a dict.");

  m.def(
      "parse_eml",
      [](const py::bytes& data) {
        mailbot::RawMessage raw;
        const auto bytes = as_span(data);
        raw.bytes.assign(bytes.begin(), bytes.end());
        const mailbot::ParsedMessage msg = mailbot::parse_message(raw, 1, "py");
        py::dict out;
        out["sender"] = msg.sender;
        out["sender_display"] = msg.sender_display;
        out["recipients"] = msg.recipients;
        out["subject"] = msg.subject;
        out["date"] = mailbot::format_timestamp_iso(msg.date);
        out["body_text"] = msg.body_text;
        out["warnings"] = msg.warnings;
        py::list attachments;
        for (const mailbot::Attachment& att : msg.attachments) {
          py::dict a;
          a["filename"] = att.filename;
          a["media_type"] = att.media_type;
          a["content"] = py::bytes(
              reinterpret_cast<const char*>(att.decoded_bytes.data()),
              static_cast<Py_ssize_t>(att.decoded_bytes.size()));
          if (att.text_content) a["text"] = *att.text_content;
          attachments.append(a);
        }
        out["attachments"] = attachments;
        return out;
      },
      py::arg("data"), "Parses an RFC 5322 message with its MIME attachments.");

  m.def(
      "classify",
      [](const std::string& subject, const std::string& sender, const std::string& body,
         const std::optional<std::string>& rules_json,
         const std::optional<std::string>& blocklist_text) {
        mailbot::RulesBundle rules =
            rules_json ? mailbot::load_ruleset(*rules_json) : mailbot::default_rules();
        mailbot::SenderBlocklist blocklist;
        if (blocklist_text) blocklist = mailbot::load_blocklist(*blocklist_text);
        mailbot::ParsedMessage msg;
        msg.subject = subject;
        msg.sender = sender;
        msg.body_text = body;
        return decision_to_dict(mailbot::classify_message(msg, rules.ruleset, blocklist));
      },
      py::arg("subject"), py::arg("sender") = "", py::arg("body") = "",
      py::arg("rules_json") = std::nullopt, py::arg("blocklist") = std::nullopt,
      "Classifies one message; default rules route resume/bill/invoice keywords.");

  m.def(
      "decode_transfer_encoding",
      [](const py::bytes& data, const std::string& encoding) {
        const auto decoded = mailbot::decode_transfer_encoding(
            as_span(data), mailbot::transfer_encoding_from_token(encoding));
        return py::bytes(reinterpret_cast<const char*>(decoded.data()),
                         static_cast<Py_ssize_t>(decoded.size()));
      },
      py::arg("data"), py::arg("encoding"),
      "Decodes base64 / quoted-printable / identity transfer encodings.");

  m.def(
      "encode_base64",
      [](const py::bytes& data) { return mailbot::encode_base64(as_span(data)); },
      py::arg("data"));

  m.def(
      "encode_quoted_printable",
      [](const py::bytes& data) { return mailbot::encode_quoted_printable(as_span(data)); },
      py::arg("data"));

  m.def(
      "sha256_hex", [](const py::bytes& data) { return mailbot::sha256_hex(as_span(data)); },
      py::arg("data"));

  m.def("normalize_text",
        [](const std::string& text) { return mailbot::normalize_text(text).text; },
        py::arg("text"), "HTML stripped, whitespace collapsed, ASCII lowercased.");

  m.def("manual_baseline", &mailbot::manual_baseline, py::arg("n_emails"),
        py::arg("seconds_per_email") = 78.0);

  m.def(
      "compute_speedup",
      [](double baseline, double elapsed) -> std::optional<double> {
        return mailbot::compute_speedup(baseline, elapsed);
      },
      py::arg("baseline_seconds"), py::arg("elapsed_seconds"),
      "baseline/elapsed, or None when elapsed is zero.");
}
