// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fracsample {

// Precondition violated on a pure operation (bad argument, out-of-range index).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A thinking trace has fewer tokens than requested segments.
class InsufficientTokens : public DomainError {
 public:
  InsufficientTokens(int tokens, int segments);
  int tokens() const { return tokens_; }
  int segments() const { return segments_; }

 private:
  int tokens_;
  int segments_;
};

// Invalid configuration document or model specification.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backend failures. Transport errors are retried by the gateway; errors
// carrying an HTTP status came back from the server and are terminal.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, int status, bool transport)
      : std::runtime_error(what), status_(status), transport_(transport) {}
  int status() const { return status_; }
  bool transport() const { return transport_; }

 private:
  int status_;
  bool transport_;
};

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptRecord : public StoreError {
 public:
  CorruptRecord(const std::string& path, std::uint64_t byte_offset, const std::string& detail);
  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

class DuplicateRecord : public StoreError {
 public:
  DuplicateRecord(const std::string& identity, std::uint64_t existing_id);
  std::uint64_t existing_id() const { return existing_id_; }

 private:
  std::uint64_t existing_id_;
};

}  // namespace fracsample
