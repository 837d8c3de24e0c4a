//! RFC 4180 style record reader and writer.
//!
//! Double quotes delimit a field; a doubled quote inside a quoted field is a
//! literal quote. Unquoted fields have surrounding whitespace trimmed, quoted
//! fields are kept verbatim. `\n`, `\r\n` and a bare `\r` all end a record.
//! Lines with no characters at all are skipped.

use crate::error::{Error, Result};

/// One parsed record and the (1-based) line it starts on.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Record {
    pub line: usize,
    pub fields: Vec<String>,
}

pub(crate) struct RecordReader<'a> {
    source_name: &'a str,
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    delimiter: char,
    line: usize,
}

impl<'a> RecordReader<'a> {
    pub fn new(source_name: &'a str, text: &'a str, delimiter: char) -> Self {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        RecordReader {
            source_name,
            chars: text.chars().peekable(),
            delimiter,
            line: 1,
        }
    }

    fn quote_error(&self, line: usize, message: &str) -> Error {
        Error::MalformedQuote {
            source_name: self.source_name.to_string(),
            line,
            message: message.to_string(),
        }
    }

    /// Consumes a line terminator if one is next. Returns true if it did.
    fn eat_newline(&mut self) -> bool {
        match self.chars.peek() {
            Some('\n') => {
                self.chars.next();
                self.line += 1;
                true
            }
            Some('\r') => {
                self.chars.next();
                if self.chars.peek() == Some(&'\n') {
                    self.chars.next();
                }
                self.line += 1;
                true
            }
            _ => false,
        }
    }

    fn read_record(&mut self) -> Result<Option<Record>> {
        // skip empty lines
        while self.eat_newline() {}
        if self.chars.peek().is_none() {
            return Ok(None);
        }
        let start_line = self.line;
        let mut fields = Vec::new();
        loop {
            let field = self.read_field(start_line)?;
            fields.push(field);
            match self.chars.peek() {
                Some(&c) if c == self.delimiter => {
                    self.chars.next();
                }
                None => break,
                Some(_) => {
                    self.eat_newline();
                    break;
                }
            }
        }
        Ok(Some(Record {
            line: start_line,
            fields,
        }))
    }

    /// Reads one field, leaving the delimiter or line terminator unconsumed.
    fn read_field(&mut self, record_line: usize) -> Result<String> {
        let delimiter = self.delimiter;
        let mut raw = String::new();
        // leading whitespace is only significant if no quote follows
        while let Some(&c) = self.chars.peek() {
            if c != delimiter && c != '\n' && c != '\r' && c.is_whitespace() {
                raw.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if self.chars.peek() == Some(&'"') {
            self.chars.next();
            let open_line = self.line;
            let mut value = String::new();
            loop {
                match self.chars.next() {
                    None => {
                        return Err(self.quote_error(open_line, "unterminated quoted field"));
                    }
                    Some('"') => {
                        if self.chars.peek() == Some(&'"') {
                            self.chars.next();
                            value.push('"');
                        } else {
                            break;
                        }
                    }
                    Some('\n') => {
                        self.line += 1;
                        value.push('\n');
                    }
                    Some('\r') => {
                        if self.chars.peek() == Some(&'\n') {
                            self.chars.next();
                            value.push_str("\r\n");
                        } else {
                            value.push('\r');
                        }
                        self.line += 1;
                    }
                    Some(c) => value.push(c),
                }
            }
            // only whitespace may follow a closing quote
            while let Some(&c) = self.chars.peek() {
                if c == delimiter || c == '\n' || c == '\r' {
                    break;
                }
                if c.is_whitespace() {
                    self.chars.next();
                } else {
                    return Err(self.quote_error(
                        self.line.max(record_line),
                        "unexpected character after closing quote",
                    ));
                }
            }
            return Ok(value);
        }
        while let Some(&c) = self.chars.peek() {
            if c == delimiter || c == '\n' || c == '\r' {
                break;
            }
            if c == '"' {
                return Err(self.quote_error(self.line, "quote inside an unquoted field"));
            }
            raw.push(c);
            self.chars.next();
        }
        Ok(raw.trim().to_string())
    }
}

impl Iterator for RecordReader<'_> {
    type Item = Result<Record>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_record().transpose()
    }
}

/// Splits a single line into fields using the reader's quoting rules.
pub(crate) fn split_line(text: &str, delimiter: char) -> Result<Vec<String>> {
    let mut reader = RecordReader::new("<list>", text, delimiter);
    Ok(reader
        .read_record()?
        .map(|record| record.fields)
        .unwrap_or_default())
}

/// Quotes `field` if writing it bare would not read back identically.
pub(crate) fn escape_field(field: &str, delimiter: char) -> String {
    let needs_quotes = field.is_empty()
        || field.contains(delimiter)
        || field.contains('"')
        || field.contains('\n')
        || field.contains('\r')
        || field.trim() != field;
    if needs_quotes {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// 1-based line number containing byte `offset`.
pub(crate) fn line_of_offset(bytes: &[u8], offset: usize) -> usize {
    1 + bytes[..offset].iter().filter(|&&b| b == b'\n').count()
}
