use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub fn open_input(path: &str) -> CliResult<Box<dyn BufRead>> {
    if path == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    File::open(path)
        .map(|f| Box::new(BufReader::new(f)) as Box<dyn BufRead>)
        .map_err(|e| CliError::Data(format!("{path}: {e}")))
}

pub fn create_output(path: &str) -> CliResult<Box<dyn Write>> {
    if path == "-" {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    File::create(path)
        .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
        .map_err(|e| CliError::Data(format!("{path}: {e}")))
}

pub fn read_to_string(path: &str) -> CliResult<String> {
    let mut text = String::new();
    for line in Lines::new(open_input(path)?, path) {
        let (_, line) = line?;
        text.push_str(&line);
        text.push('\n');
    }
    Ok(text)
}

pub fn read_lines(path: &str) -> CliResult<Vec<String>> {
    Lines::new(open_input(path)?, path)
        .map(|l| l.map(|(_, s)| s))
        .collect()
}

/// Numbered UTF-8 lines without terminators; invalid UTF-8 is a data error.
pub struct Lines<R> {
    reader: R,
    name: String,
    line_no: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> Lines<R> {
    pub fn new(reader: R, name: &str) -> Self {
        Lines {
            reader,
            name: name.to_owned(),
            line_no: 0,
            buf: Vec::new(),
        }
    }
}

impl<R: BufRead> Iterator for Lines<R> {
    type Item = CliResult<(usize, String)>;

    fn next(&mut self) -> Option<Self::Item> {
        self.buf.clear();
        match self.reader.read_until(b'\n', &mut self.buf) {
            Ok(0) => return None,
            Ok(_) => {}
            Err(e) => return Some(Err(CliError::Data(format!("{}: {e}", self.name)))),
        }
        self.line_no += 1;
        if self.buf.last() == Some(&b'\n') {
            self.buf.pop();
            if self.buf.last() == Some(&b'\r') {
                self.buf.pop();
            }
        }
        let bytes = std::mem::take(&mut self.buf);
        Some(match String::from_utf8(bytes) {
            Ok(s) => Ok((self.line_no, s)),
            Err(_) => Err(CliError::Data(format!(
                "{}: line {}: invalid UTF-8",
                self.name, self.line_no
            ))),
        })
    }
}

/// Maps items in parallel chunks and feeds the results to `sink` in input
/// order. Memory is bounded by the chunk size.
pub fn map_ordered<I, T, U, F, S>(
    items: I,
    pool: &rayon::ThreadPool,
    map: F,
    mut sink: S,
) -> CliResult<()>
where
    I: Iterator<Item = CliResult<T>>,
    T: Send,
    U: Send,
    F: Fn(T) -> CliResult<U> + Sync,
    S: FnMut(U) -> CliResult<()>,
{
    let chunk_size = pool.current_num_threads() * 512;
    let mut items = items.peekable();
    while items.peek().is_some() {
        let chunk = items
            .by_ref()
            .take(chunk_size)
            .collect::<CliResult<Vec<T>>>()?;
        let mapped: Vec<CliResult<U>> = pool.install(|| chunk.into_par_iter().map(&map).collect());
        for m in mapped {
            sink(m?)?;
        }
    }
    Ok(())
}

pub fn write_line(out: &mut dyn Write, line: &str) -> CliResult<()> {
    out.write_all(line.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}
