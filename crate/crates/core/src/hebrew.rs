//! Hebrew script helpers: letter classes, final forms and vowel points.

/// Letters with a distinct word-final glyph, as `(regular, final)` pairs.
const FINAL_PAIRS: [(char, char); 5] = [('כ', 'ך'), ('מ', 'ם'), ('נ', 'ן'), ('פ', 'ף'), ('צ', 'ץ')];

/// The 22 letters of the alphabet in their regular (non-final) form.
pub const BASE_LETTERS: [char; 22] = [
    'א', 'ב', 'ג', 'ד', 'ה', 'ו', 'ז', 'ח', 'ט', 'י', 'כ', 'ל', 'מ', 'נ', 'ס', 'ע', 'פ', 'צ', 'ק',
    'ר', 'ש', 'ת',
];

pub fn is_letter(c: char) -> bool {
    ('\u{05D0}'..='\u{05EA}').contains(&c)
}

pub fn is_final_form(c: char) -> bool {
    FINAL_PAIRS.iter().any(|&(_, f)| f == c)
}

/// Maps a regular letter to its word-final glyph; other characters are returned unchanged.
pub fn to_final(c: char) -> char {
    FINAL_PAIRS
        .iter()
        .find(|&&(r, _)| r == c)
        .map_or(c, |&(_, f)| f)
}

/// Maps a word-final glyph to its regular form; other characters are returned unchanged.
pub fn to_non_final(c: char) -> char {
    FINAL_PAIRS
        .iter()
        .find(|&&(_, f)| f == c)
        .map_or(c, |&(r, _)| r)
}

/// Rewrites a trailing final-form letter to its regular form, for use when
/// more material is appended after `s`.
pub fn open_final(s: &str) -> String {
    let mut out = s.to_owned();
    if let Some(last) = out.pop() {
        out.push(to_non_final(last));
    }
    out
}

/// Rewrites every final-form letter except the last character to its regular form.
pub fn normalize_interior_finals(s: &str) -> String {
    let n = s.chars().count();
    s.chars()
        .enumerate()
        .map(|(i, c)| if i + 1 < n { to_non_final(c) } else { c })
        .collect()
}

/// True for the pointing marks in U+05B0..=U+05C7. The punctuation code points
/// in that block (maqaf, paseq, sof pasuq, nun hafukha) are not marks.
pub fn is_diacritic(c: char) -> bool {
    matches!(c, '\u{05B0}'..='\u{05C7}')
        && !matches!(c, '\u{05BE}' | '\u{05C0}' | '\u{05C3}' | '\u{05C6}')
}

pub fn strip_diacritics(s: &str) -> String {
    s.chars().filter(|&c| !is_diacritic(c)).collect()
}

/// True if every character of `s` is a Hebrew letter and `s` is non-empty.
pub fn is_hebrew_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_letter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn final_forms_round_trip() {
        for (r, f) in FINAL_PAIRS {
            assert_eq!(to_final(r), f);
            assert_eq!(to_non_final(f), r);
            assert!(is_final_form(f));
            assert!(!is_final_form(r));
        }
        assert_eq!(to_final('א'), 'א');
    }

    #[test]
    fn open_final_only_touches_last_letter() {
        assert_eq!(open_final("שלום"), "שלומ");
        assert_eq!(open_final("ספר"), "ספר");
        assert_eq!(open_final(""), "");
    }

    #[test]
    fn interior_finals() {
        assert_eq!(normalize_interior_finals("ןו"), "נו");
        assert_eq!(normalize_interior_finals("כם"), "כם");
    }

    #[test]
    fn diacritics_strip_keeps_maqaf() {
        assert_eq!(strip_diacritics("שָׁלוֹם"), "שלום");
        assert_eq!(strip_diacritics("בית־ספר"), "בית־ספר");
    }

    #[test]
    fn hebrew_word_detection() {
        assert!(is_hebrew_word("שחרור"));
        assert!(!is_hebrew_word("שחרור1"));
        assert!(!is_hebrew_word("abc"));
        assert!(!is_hebrew_word(""));
    }
}
