//! Line-oriented tokenizer shared by the text formats. `#` starts a comment; blank
//! lines are skipped; columns are 1-based character positions.

use std::fmt;

use crate::error::{Error, Result};

pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    pub(crate) fn next_line(&mut self) -> Option<Line<'a>> {
        for (i, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("");
            if !body.trim().is_empty() {
                return Some(Line::new(i + 1, body));
            }
        }
        None
    }
}

pub(crate) struct Line<'a> {
    pub(crate) number: usize,
    body: &'a str,
    /// (column, byte offset of the end, word)
    words: Vec<(usize, usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn new(number: usize, body: &'a str) -> Self {
        let mut words = Vec::new();
        let mut start: Option<usize> = None;
        for (offset, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (true, Some(s)) => {
                    words.push((column_of(body, s), offset, &body[s..offset]));
                    start = None;
                }
                (false, None) => start = Some(offset),
                _ => {}
            }
        }
        Line { number, body, words }
    }

    pub(crate) fn keyword(&self) -> &'a str {
        self.words.first().map(|w| w.2).unwrap_or("")
    }

    pub(crate) fn word_count(&self) -> usize {
        self.words.len()
    }

    pub(crate) fn error(&self, msg: impl fmt::Display) -> Error {
        let column = self.words.first().map(|w| w.0).unwrap_or(1);
        Error::parse(self.number, column, msg)
    }

    pub(crate) fn error_at(&self, column: usize, msg: impl fmt::Display) -> Error {
        Error::parse(self.number, column, msg)
    }

    pub(crate) fn expect_words(&self, n: usize) -> Result<()> {
        if self.words.len() == n {
            return Ok(());
        }
        let column = self
            .words
            .get(n)
            .map(|w| w.0)
            .unwrap_or_else(|| column_of(self.body, self.body.trim_end().len()) + 1);
        Err(Error::parse(
            self.number,
            column,
            format!(
                "`{}` expects {} field(s), found {}",
                self.keyword(),
                n - 1,
                self.words.len() - 1
            ),
        ))
    }

    pub(crate) fn word_at(&self, i: usize) -> Result<&'a str> {
        self.words.get(i).map(|w| w.2).ok_or_else(|| {
            let column = column_of(self.body, self.body.trim_end().len()) + 1;
            Error::parse(self.number, column, format!("`{}` is missing a field", self.keyword()))
        })
    }

    pub(crate) fn column_of_word(&self, i: usize) -> usize {
        self.words.get(i).map(|w| w.0).unwrap_or(1)
    }

    pub(crate) fn number_at(&self, i: usize) -> Result<usize> {
        let word = self.word_at(i)?;
        word.parse::<usize>().map_err(|_| {
            Error::parse(
                self.number,
                self.words[i].0,
                format!("expected a non-negative integer, found `{word}`"),
            )
        })
    }

    pub(crate) fn numbers_from(&self, i: usize) -> Result<Vec<usize>> {
        (i..self.words.len()).map(|k| self.number_at(k)).collect()
    }

    pub(crate) fn tuples_after_keyword(&self) -> Result<Vec<(Vec<usize>, usize)>> {
        self.tuples_after(1)
    }

    /// Parses `(a,b,..)` groups following the first `skip` words.
    pub(crate) fn tuples_after(&self, skip: usize) -> Result<Vec<(Vec<usize>, usize)>> {
        let start = match skip.checked_sub(1).and_then(|k| self.words.get(k)) {
            Some(&(_, end, _)) => end,
            None => 0,
        };
        let chars: Vec<(usize, char)> = self.body[start..].char_indices().map(|(o, c)| (o + start, c)).collect();
        let col = |k: usize| {
            chars
                .get(k)
                .map(|&(o, _)| column_of(self.body, o))
                .unwrap_or_else(|| column_of(self.body, self.body.len()))
        };
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            if k == chars.len() {
                return Ok(out);
            }
            if chars[k].1 != '(' {
                return Err(self.error_at(col(k), format!("expected `(`, found `{}`", chars[k].1)));
            }
            let open = col(k);
            k += 1;
            let mut tuple = Vec::new();
            loop {
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                let digits_start = k;
                while k < chars.len() && chars[k].1.is_ascii_digit() {
                    k += 1;
                }
                if digits_start == k {
                    return Err(self.error_at(col(k), "expected an element index"));
                }
                let digits: String = chars[digits_start..k].iter().map(|&(_, c)| c).collect();
                let value = digits
                    .parse::<usize>()
                    .map_err(|_| self.error_at(col(digits_start), "element index too large"))?;
                tuple.push(value);
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                match chars.get(k).map(|&(_, c)| c) {
                    Some(',') => k += 1,
                    Some(')') => {
                        k += 1;
                        break;
                    }
                    Some(c) => return Err(self.error_at(col(k), format!("expected `,` or `)`, found `{c}`"))),
                    None => return Err(self.error_at(col(k), "unclosed `(`")),
                }
            }
            out.push((tuple, open));
        }
    }
}

fn column_of(body: &str, byte_offset: usize) -> usize {
    body[..byte_offset].chars().count() + 1
}
