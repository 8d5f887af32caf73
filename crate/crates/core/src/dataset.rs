//! Synthetic character rasters: embedded glyph templates, seeded generation
//! with shift and pixel noise, flattening into feature vectors, one-vs-rest
//! task construction, and the CSV interchange format.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fsutil;
use crate::perceptron::{FeatureVector, LabeledDataset};

/// Raster edge length in pixels.
pub const RASTER_SIZE: usize = 16;

/// Quadratic source masks, one byte row per glyph line, doubled to 16x16 at
/// template construction.
const GLYPH_ROWS: &[(char, [u8; 8])] = &[
    ('A', [0x38, 0x44, 0x82, 0xFE, 0x82, 0x82, 0x82, 0x00]),
    ('B', [0xFC, 0x82, 0x82, 0xFC, 0x82, 0x82, 0xFC, 0x00]),
    ('C', [0x7C, 0x82, 0x80, 0x80, 0x80, 0x82, 0x7C, 0x00]),
    ('D', [0xF8, 0x84, 0x82, 0x82, 0x82, 0x84, 0xF8, 0x00]),
    ('E', [0xFE, 0x80, 0x80, 0xFC, 0x80, 0x80, 0xFE, 0x00]),
    ('F', [0xFE, 0x80, 0x80, 0xFC, 0x80, 0x80, 0x80, 0x00]),
    ('G', [0x7C, 0x82, 0x80, 0x9E, 0x82, 0x82, 0x7C, 0x00]),
    ('H', [0x82, 0x82, 0x82, 0xFE, 0x82, 0x82, 0x82, 0x00]),
    ('I', [0x7C, 0x10, 0x10, 0x10, 0x10, 0x10, 0x7C, 0x00]),
    ('J', [0x3E, 0x04, 0x04, 0x04, 0x84, 0x84, 0x78, 0x00]),
    ('K', [0x84, 0x88, 0x90, 0xE0, 0x90, 0x88, 0x84, 0x00]),
    ('L', [0x80, 0x80, 0x80, 0x80, 0x80, 0x80, 0xFE, 0x00]),
    ('M', [0x82, 0xC6, 0xAA, 0x92, 0x82, 0x82, 0x82, 0x00]),
    ('N', [0x82, 0xC2, 0xA2, 0x92, 0x8A, 0x86, 0x82, 0x00]),
    ('O', [0x7C, 0x82, 0x82, 0x82, 0x82, 0x82, 0x7C, 0x00]),
    ('P', [0xFC, 0x82, 0x82, 0xFC, 0x80, 0x80, 0x80, 0x00]),
    ('Q', [0x7C, 0x82, 0x82, 0x82, 0x8A, 0x84, 0x7A, 0x00]),
    ('R', [0xFC, 0x82, 0x82, 0xFC, 0x90, 0x88, 0x84, 0x00]),
    ('S', [0x7C, 0x82, 0x80, 0x7C, 0x02, 0x82, 0x7C, 0x00]),
    ('T', [0xFE, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x00]),
    ('U', [0x82, 0x82, 0x82, 0x82, 0x82, 0x82, 0x7C, 0x00]),
    ('V', [0x82, 0x82, 0x44, 0x44, 0x28, 0x28, 0x10, 0x00]),
    ('W', [0x82, 0x82, 0x82, 0x92, 0xAA, 0xC6, 0x82, 0x00]),
    ('X', [0x82, 0x44, 0x28, 0x10, 0x28, 0x44, 0x82, 0x00]),
    ('Y', [0x82, 0x44, 0x28, 0x10, 0x10, 0x10, 0x10, 0x00]),
    ('Z', [0xFE, 0x04, 0x08, 0x10, 0x20, 0x40, 0xFE, 0x00]),
];

/// One 16x16 8-bit character image with its class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterExample {
    pub pixels: [[u8; RASTER_SIZE]; RASTER_SIZE],
    pub label: char,
}

/// A binary ink mask for one character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphTemplate {
    character: char,
    bitmap: [[bool; RASTER_SIZE]; RASTER_SIZE],
}

impl GlyphTemplate {
    /// Builds a template, rejecting an all-background mask.
    pub fn new(character: char, bitmap: [[bool; RASTER_SIZE]; RASTER_SIZE]) -> Result<Self> {
        if !bitmap.iter().flatten().any(|&ink| ink) {
            return Err(Error::invalid(format!("glyph template {character:?} has no ink")));
        }
        Ok(Self { character, bitmap })
    }

    /// Looks up the embedded template for `character`.
    pub fn builtin(character: char) -> Result<Self> {
        let rows = GLYPH_ROWS
            .iter()
            .find(|(c, _)| *c == character)
            .map(|(_, rows)| rows)
            .ok_or(Error::UnknownCharacter(character))?;
        let mut bitmap = [[false; RASTER_SIZE]; RASTER_SIZE];
        for (r, row) in rows.iter().enumerate() {
            for c in 0..8 {
                if row & (0x80 >> c) != 0 {
                    bitmap[2 * r][2 * c] = true;
                    bitmap[2 * r][2 * c + 1] = true;
                    bitmap[2 * r + 1][2 * c] = true;
                    bitmap[2 * r + 1][2 * c + 1] = true;
                }
            }
        }
        Self::new(character, bitmap)
    }

    /// Characters with embedded templates, in table order.
    pub fn builtin_charset() -> Vec<char> {
        GLYPH_ROWS.iter().map(|(c, _)| *c).collect()
    }

    pub fn character(&self) -> char {
        self.character
    }

    pub fn bitmap(&self) -> &[[bool; RASTER_SIZE]; RASTER_SIZE] {
        &self.bitmap
    }

    /// Renders the mask at the given ink level over the given background.
    pub fn render(&self, ink_level: u8, background_level: u8) -> RasterExample {
        let mut pixels = [[background_level; RASTER_SIZE]; RASTER_SIZE];
        for (r, row) in self.bitmap.iter().enumerate() {
            for (c, &ink) in row.iter().enumerate() {
                if ink {
                    pixels[r][c] = ink_level;
                }
            }
        }
        RasterExample { pixels, label: self.character }
    }
}

/// Knobs for synthetic raster generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationParams {
    pub charset: Vec<char>,
    pub instances_per_class: u32,
    pub seed: u64,
    /// Per-pixel uniform noise in [-amplitude, +amplitude].
    pub noise_amplitude: u8,
    /// Translations drawn uniformly from [-max_shift, +max_shift] per axis.
    pub max_shift: u8,
    pub ink_level: u8,
    pub background_level: u8,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            charset: GlyphTemplate::builtin_charset(),
            instances_per_class: 34,
            seed: 42,
            noise_amplitude: 32,
            max_shift: 1,
            ink_level: 255,
            background_level: 0,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<()> {
        if self.charset.is_empty() {
            return Err(Error::invalid("charset must not be empty"));
        }
        if self.instances_per_class < 1 {
            return Err(Error::invalid("instances_per_class must be at least 1"));
        }
        if self.max_shift > 3 {
            return Err(Error::invalid("max_shift above 3 would push glyphs out of frame"));
        }
        if self.ink_level == self.background_level {
            return Err(Error::invalid("ink_level must differ from background_level"));
        }
        Ok(())
    }
}

/// Produces `instances_per_class` perturbed rasters per charset character:
/// render, translate by a random in-frame shift (clipping at borders), add
/// per-pixel noise, clamp to the byte range. Deterministic under the seed.
pub fn generate(params: &GenerationParams) -> Result<Vec<RasterExample>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let shift = i32::from(params.max_shift);
    let noise = i32::from(params.noise_amplitude);
    let mut examples = Vec::with_capacity(params.charset.len() * params.instances_per_class as usize);

    for &character in &params.charset {
        let template = GlyphTemplate::builtin(character)?;
        for _ in 0..params.instances_per_class {
            let dr = rng.gen_range(-shift..=shift);
            let dc = rng.gen_range(-shift..=shift);
            let mut pixels = [[params.background_level; RASTER_SIZE]; RASTER_SIZE];
            for r in 0..RASTER_SIZE {
                for c in 0..RASTER_SIZE {
                    let src_r = r as i32 - dr;
                    let src_c = c as i32 - dc;
                    let inked = (0..RASTER_SIZE as i32).contains(&src_r)
                        && (0..RASTER_SIZE as i32).contains(&src_c)
                        && template.bitmap[src_r as usize][src_c as usize];
                    let base = if inked { params.ink_level } else { params.background_level };
                    let value = i32::from(base) + rng.gen_range(-noise..=noise);
                    pixels[r][c] = value.clamp(0, 255) as u8;
                }
            }
            examples.push(RasterExample { pixels, label: character });
        }
    }
    Ok(examples)
}

/// Row-major flattening into a 256-component real vector.
pub fn flatten(example: &RasterExample) -> FeatureVector {
    let components = example
        .pixels
        .iter()
        .flatten()
        .map(|&p| f64::from(p))
        .collect();
    FeatureVector::new(components).expect("a raster always yields a finite non-empty vector")
}

/// Splits the examples into target-vs-rest, preserving input order inside
/// each class.
pub fn make_binary_task(examples: &[RasterExample], target: char) -> Result<LabeledDataset> {
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for example in examples {
        if example.label == target {
            positives.push(flatten(example));
        } else {
            negatives.push(flatten(example));
        }
    }
    if positives.is_empty() {
        return Err(Error::invalid(format!("target character {target:?} is absent from the examples")));
    }
    if negatives.is_empty() {
        return Err(Error::invalid(format!("no examples other than {target:?} to form the negative class")));
    }
    LabeledDataset::new(positives, negatives)
}

/// Writes `label,p0,...,p255` rows, no header.
pub fn write_csv<W: Write>(examples: &[RasterExample], mut out: W) -> Result<()> {
    for example in examples {
        if matches!(example.label, ',' | '\n' | '\r') {
            return Err(Error::invalid(format!(
                "label {:?} cannot be represented in the CSV format",
                example.label
            )));
        }
        write!(out, "{}", example.label)?;
        for p in example.pixels.iter().flatten() {
            write!(out, ",{p}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Parses rows written by [`write_csv`], reporting the first bad line.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<RasterExample>> {
    let mut examples = Vec::new();
    for (index, line) in input.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let mut fields = line.split(',');
        let label_field = fields.next().unwrap_or("");
        let mut chars = label_field.chars();
        let label = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => {
                return Err(Error::format(
                    line_no,
                    format!("label must be a single character, got {label_field:?}"),
                ))
            }
        };
        let mut pixels = [[0u8; RASTER_SIZE]; RASTER_SIZE];
        let mut count = 0usize;
        for field in fields {
            if count >= RASTER_SIZE * RASTER_SIZE {
                count += 1;
                continue;
            }
            let value: i64 = field.parse().map_err(|_| {
                Error::format(line_no, format!("pixel {count} is not an integer: {field:?}"))
            })?;
            if !(0..=255).contains(&value) {
                return Err(Error::format(
                    line_no,
                    format!("pixel {count} out of range 0-255: {value}"),
                ));
            }
            pixels[count / RASTER_SIZE][count % RASTER_SIZE] = value as u8;
            count += 1;
        }
        if count != RASTER_SIZE * RASTER_SIZE {
            return Err(Error::format(
                line_no,
                format!("expected 257 fields (label + 256 pixels), got {}", count + 1),
            ));
        }
        examples.push(RasterExample { pixels, label });
    }
    Ok(examples)
}

/// Writes the CSV atomically: the target appears complete or not at all.
pub fn save_csv(examples: &[RasterExample], path: &Path) -> Result<()> {
    let mut bytes = Vec::new();
    write_csv(examples, &mut bytes)?;
    fsutil::atomic_write(path, &bytes)
}

pub fn load_csv(path: &Path) -> Result<Vec<RasterExample>> {
    let file = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_templates_are_inked_and_distinct() {
        let charset = GlyphTemplate::builtin_charset();
        assert_eq!(charset.len(), 26);
        let templates: Vec<GlyphTemplate> = charset
            .iter()
            .map(|&c| GlyphTemplate::builtin(c).unwrap())
            .collect();
        for t in &templates {
            assert!(t.bitmap().iter().flatten().any(|&ink| ink), "{:?} has no ink", t.character());
        }
        for (i, a) in templates.iter().enumerate() {
            for b in &templates[i + 1..] {
                assert_ne!(a.bitmap(), b.bitmap(), "{:?} and {:?} collide", a.character(), b.character());
            }
        }
    }

    #[test]
    fn unknown_characters_are_rejected() {
        assert!(matches!(GlyphTemplate::builtin('a'), Err(Error::UnknownCharacter('a'))));
    }

    #[test]
    fn degenerate_params_reproduce_the_template_exactly() {
        let params = GenerationParams {
            charset: vec!['A'],
            instances_per_class: 5,
            noise_amplitude: 0,
            max_shift: 0,
            ..GenerationParams::default()
        };
        let rendered = GlyphTemplate::builtin('A').unwrap().render(255, 0);
        for example in generate(&params).unwrap() {
            assert_eq!(example, rendered);
        }
    }

    #[test]
    fn generate_honors_class_counts() {
        let params = GenerationParams {
            charset: ('B'..='Z').collect(),
            instances_per_class: 34,
            ..GenerationParams::default()
        };
        assert_eq!(params.charset.len(), 25);
        assert_eq!(generate(&params).unwrap().len(), 850);
        assert_eq!(generate(&GenerationParams::default()).unwrap().len(), 884);
    }

    #[test]
    fn generate_is_deterministic_under_the_seed() {
        let params = GenerationParams { instances_per_class: 3, ..GenerationParams::default() };
        assert_eq!(generate(&params).unwrap(), generate(&params).unwrap());
        let reseeded = GenerationParams { seed: 43, ..params.clone() };
        assert_ne!(generate(&params).unwrap(), generate(&reseeded).unwrap());
    }

    #[test]
    fn params_invariants_are_enforced() {
        let mut params = GenerationParams::default();
        params.max_shift = 4;
        assert!(params.validate().is_err());
        params = GenerationParams::default();
        params.ink_level = 7;
        params.background_level = 7;
        assert!(params.validate().is_err());
    }

    #[test]
    fn flatten_is_row_major() {
        let mut pixels = [[0u8; RASTER_SIZE]; RASTER_SIZE];
        pixels[0][1] = 7;
        let v = flatten(&RasterExample { pixels, label: 'A' });
        assert_eq!(v.dim(), 256);
        assert_eq!(v.components()[1], 7.0);
        assert!(v.components().iter().enumerate().all(|(i, &c)| i == 1 || c == 0.0));

        let bright = RasterExample { pixels: [[255; RASTER_SIZE]; RASTER_SIZE], label: 'A' };
        assert!(flatten(&bright).components().iter().all(|&c| c == 255.0));
    }

    #[test]
    fn binary_task_splits_target_against_the_rest() {
        let params = GenerationParams {
            charset: vec!['A', 'B', 'C'],
            instances_per_class: 4,
            ..GenerationParams::default()
        };
        let examples = generate(&params).unwrap();
        let task = make_binary_task(&examples, 'A').unwrap();
        assert_eq!(task.positives().len(), 4);
        assert_eq!(task.negatives().len(), 8);

        let relabeled = make_binary_task(&examples, 'B').unwrap();
        assert_eq!(relabeled.positives().len(), 4);
        assert_eq!(relabeled.negatives().len(), 8);

        assert!(make_binary_task(&examples, 'Z').is_err());
        let only_a: Vec<RasterExample> =
            examples.iter().filter(|e| e.label == 'A').cloned().collect();
        assert!(make_binary_task(&only_a, 'A').is_err());
    }

    #[test]
    fn binary_task_preserves_input_order() {
        let params = GenerationParams {
            charset: vec!['A', 'B'],
            instances_per_class: 3,
            ..GenerationParams::default()
        };
        let examples = generate(&params).unwrap();
        let task = make_binary_task(&examples, 'A').unwrap();
        let expected: Vec<FeatureVector> = examples
            .iter()
            .filter(|e| e.label == 'A')
            .map(flatten)
            .collect();
        assert_eq!(task.positives(), expected.as_slice());
    }

    #[test]
    fn csv_round_trips() {
        let params = GenerationParams {
            charset: vec!['A', 'Q'],
            instances_per_class: 2,
            ..GenerationParams::default()
        };
        let examples = generate(&params).unwrap();
        let mut bytes = Vec::new();
        write_csv(&examples, &mut bytes).unwrap();
        let loaded = read_csv(bytes.as_slice()).unwrap();
        assert_eq!(loaded, examples);
    }

    #[test]
    fn csv_reader_names_the_offending_line() {
        let good: String = {
            let example = GlyphTemplate::builtin('A').unwrap().render(255, 0);
            let mut bytes = Vec::new();
            write_csv(std::slice::from_ref(&example), &mut bytes).unwrap();
            String::from_utf8(bytes).unwrap()
        };

        // 255 pixels instead of 256.
        let short = format!("{good}B{}\n", ",1".repeat(255));
        match read_csv(short.as_bytes()) {
            Err(Error::Format { line: 2, .. }) => {}
            other => panic!("expected a format error at line 2, got {other:?}"),
        }

        // Pixel out of byte range.
        let hot = format!("A{},256\n", ",0".repeat(255));
        match read_csv(hot.as_bytes()) {
            Err(Error::Format { line: 1, reason }) => assert!(reason.contains("256")),
            other => panic!("expected a range error at line 1, got {other:?}"),
        }

        // Label longer than one character.
        let wide = format!("AB{}\n", ",0".repeat(256));
        assert!(matches!(read_csv(wide.as_bytes()), Err(Error::Format { line: 1, .. })));
    }
}
