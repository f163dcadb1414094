//! Best-effort LaTeX-to-plain-text stripping.
//!
//! The goal is a clean token stream for embedding training, not a faithful
//! rendering: comments, math, and reference machinery disappear; running
//! prose survives. The operation is total — malformed or truncated input
//! degrades to dropping the unparseable tail, never to an error.

/// Commands whose argument is non-linguistic and is removed along with the
/// command itself.
const DROP_ARGUMENT: &[&str] = &[
    "cite",
    "citep",
    "citet",
    "ref",
    "eqref",
    "label",
    "includegraphics",
    "bibliography",
    "url",
];

/// Environments whose entire body is display math and is removed.
const MATH_ENVIRONMENTS: &[&str] = &["equation", "align", "eqnarray"];

/// Strip LaTeX markup, returning plain text with whitespace collapsed.
///
/// Rules, in the order they apply while scanning:
/// - `%` comments run to end of line and are removed.
/// - `$...$`, `$$...$$`, `\(...\)`, `\[...\]`, and the bodies of
///   equation/align/eqnarray environments (starred or not) are removed.
/// - Commands in [`DROP_ARGUMENT`] are removed together with their optional
///   `[...]` and braced arguments.
/// - `\begin{...}`/`\end{...}` markers are removed (the environment name
///   never reaches the output); other command names are dropped while their
///   braced text is kept.
/// - Escaped specials (`\%`, `\&`, ...) and `~` become spaces; stray braces
///   are deleted.
///
/// The output contains none of `\`, `{`, `}`, `$`, `%`, which makes the
/// function idempotent.
pub fn strip_latex(raw: &str) -> String {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = String::with_capacity(raw.len());
    let mut i = 0;

    while i < chars.len() {
        match chars[i] {
            '%' => {
                // Comment to end of line; the newline itself survives.
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '$' => {
                i += 1;
                let display = i < chars.len() && chars[i] == '$';
                if display {
                    i += 1;
                    i = skip_until_display_close(&chars, i);
                } else {
                    i = skip_until_inline_close(&chars, i);
                }
                out.push(' ');
            }
            '\\' => {
                i += 1;
                if i >= chars.len() {
                    break;
                }
                if chars[i].is_ascii_alphabetic() {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    if i < chars.len() && chars[i] == '*' {
                        i += 1;
                    }
                    let name: String = chars[start..i].iter().collect();
                    i = handle_command(&chars, i, &name, &mut out);
                } else if chars[i] == '(' {
                    i = skip_until_marker(&chars, i + 1, &['\\', ')']);
                    out.push(' ');
                } else if chars[i] == '[' {
                    i = skip_until_marker(&chars, i + 1, &['\\', ']']);
                    out.push(' ');
                } else {
                    // Escaped special or symbol command: drop it.
                    i += 1;
                    out.push(' ');
                }
            }
            '{' | '}' => {
                // Grouping braces vanish without splitting the text.
                i += 1;
            }
            '~' => {
                i += 1;
                out.push(' ');
            }
            c => {
                out.push(c);
                i += 1;
            }
        }
    }

    collapse_whitespace(&out)
}

/// After a command name has been read, consume whatever belongs to it and
/// return the new cursor position.
fn handle_command(chars: &[char], mut i: usize, name: &str, out: &mut String) -> usize {
    let bare = name.trim_end_matches('*');
    if bare == "begin" || bare == "end" {
        let (env, next) = read_braced(chars, i);
        i = next;
        let env_bare = env.trim_end_matches('*');
        if bare == "begin" && MATH_ENVIRONMENTS.contains(&env_bare) {
            i = skip_past_environment_end(chars, i, &env);
        }
        out.push(' ');
        return i;
    }
    if DROP_ARGUMENT.contains(&bare) {
        i = skip_spaces(chars, i);
        while i < chars.len() && chars[i] == '[' {
            i = skip_bracket_group(chars, i);
            i = skip_spaces(chars, i);
        }
        if i < chars.len() && chars[i] == '{' {
            i = skip_braced_group(chars, i);
        }
        out.push(' ');
        return i;
    }
    // Generic command: the name is dropped; any braced argument text is kept
    // by the main loop (braces are deleted there).
    out.push(' ');
    i
}

/// Read a `{...}` group right after `\begin`/`\end`, returning its contents.
/// Missing braces yield an empty name and no movement past anything.
fn read_braced(chars: &[char], mut i: usize) -> (String, usize) {
    i = skip_spaces(chars, i);
    if i >= chars.len() || chars[i] != '{' {
        return (String::new(), i);
    }
    i += 1;
    let start = i;
    while i < chars.len() && chars[i] != '}' {
        i += 1;
    }
    let name: String = chars[start..i].iter().collect();
    if i < chars.len() {
        i += 1; // closing brace
    }
    (name, i)
}

fn skip_spaces(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    i
}

/// Skip a balanced `{...}` group starting at an opening brace.
fn skip_braced_group(chars: &[char], mut i: usize) -> usize {
    let mut depth = 0;
    while i < chars.len() {
        match chars[i] {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return i + 1;
                }
            }
            '\\' => i += 1, // skip escaped char inside the group
            _ => {}
        }
        i += 1;
    }
    i
}

/// Skip a `[...]` group starting at an opening bracket.
fn skip_bracket_group(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i] != ']' {
        if chars[i] == '\\' {
            i += 1;
        }
        i += 1;
    }
    (i + 1).min(chars.len())
}

/// Skip to just past the next unescaped `$`. Unclosed math eats the rest.
fn skip_until_inline_close(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() {
        match chars[i] {
            '\\' => i += 2,
            '$' => return i + 1,
            _ => i += 1,
        }
    }
    i
}

/// Skip to just past the next `$$`.
fn skip_until_display_close(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() {
        if chars[i] == '\\' {
            i += 2;
        } else if chars[i] == '$' && i + 1 < chars.len() && chars[i + 1] == '$' {
            return i + 2;
        } else {
            i += 1;
        }
    }
    i
}

/// Skip to just past a two-character closing marker like `\)` or `\]`.
fn skip_until_marker(chars: &[char], mut i: usize, marker: &[char; 2]) -> usize {
    while i + 1 < chars.len() {
        if chars[i] == marker[0] && chars[i + 1] == marker[1] {
            return i + 2;
        }
        i += 1;
    }
    chars.len()
}

/// Skip to just past `\end{env}`.
fn skip_past_environment_end(chars: &[char], mut i: usize, env: &str) -> usize {
    let closing: Vec<char> = format!("\\end{{{env}}}").chars().collect();
    while i + closing.len() <= chars.len() {
        if chars[i..i + closing.len()] == closing[..] {
            return i + closing.len();
        }
        i += 1;
    }
    chars.len()
}

fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for piece in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(piece);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwraps_formatting_commands() {
        assert_eq!(strip_latex("\\textbf{deep} learning"), "deep learning");
    }

    #[test]
    fn removes_math_and_comments() {
        assert_eq!(
            strip_latex("We use $x^2$ here. % note\nEnd"),
            "We use here. End"
        );
    }

    #[test]
    fn removes_display_math_forms() {
        assert_eq!(strip_latex("a $$x=1$$ b"), "a b");
        assert_eq!(strip_latex("a \\(x\\) b"), "a b");
        assert_eq!(strip_latex("a \\[x=2\\] b"), "a b");
    }

    #[test]
    fn removes_math_environments_starred_or_not() {
        assert_eq!(
            strip_latex("pre \\begin{equation}E=mc^2\\end{equation} post"),
            "pre post"
        );
        assert_eq!(
            strip_latex("pre \\begin{align*}x&=1\\\\y&=2\\end{align*} post"),
            "pre post"
        );
        assert_eq!(
            strip_latex("pre \\begin{eqnarray}a&=&b\\end{eqnarray} post"),
            "pre post"
        );
    }

    #[test]
    fn keeps_content_of_other_environments() {
        assert_eq!(
            strip_latex("\\begin{abstract}Short text.\\end{abstract}"),
            "Short text."
        );
        // The environment name itself must not leak into the output.
        assert!(!strip_latex("\\begin{itemize}\\item one\\end{itemize}").contains("itemize"));
    }

    #[test]
    fn drops_reference_machinery_with_arguments() {
        assert_eq!(
            strip_latex("as shown in \\cite{smith2009deep} and \\ref{sec:intro}."),
            "as shown in and ."
        );
        assert_eq!(
            strip_latex("\\includegraphics[width=0.5\\textwidth]{fig1.png} caption"),
            "caption"
        );
        assert_eq!(strip_latex("see \\url{http://example.com} now"), "see now");
        assert_eq!(strip_latex("\\cite[p.~3]{x} said"), "said");
    }

    #[test]
    fn keeps_braced_text_of_unknown_commands() {
        assert_eq!(strip_latex("\\emph{novel} \\unknowncmd{kept} x"), "novel kept x");
        assert_eq!(strip_latex("\\section{Introduction} Body"), "Introduction Body");
    }

    #[test]
    fn escaped_specials_become_spaces() {
        assert_eq!(strip_latex("50\\% of A\\&B"), "50 of A B");
    }

    #[test]
    fn survives_malformed_input() {
        // Unclosed math swallows the tail instead of erroring.
        assert_eq!(strip_latex("good $x unclosed"), "good");
        assert_eq!(strip_latex("good \\begin{equation} x = 1"), "good");
        assert_eq!(strip_latex("trailing backslash \\"), "trailing backslash");
        assert_eq!(strip_latex(""), "");
    }

    #[test]
    fn idempotent_on_representative_inputs() {
        let samples = [
            "\\textbf{deep} learning",
            "We use $x^2$ here. % note\nEnd",
            "\\begin{equation}x\\end{equation} mid \\cite{a} end",
            "nested {\\emph{groups {inside}}} here",
            "50\\% and A\\&B with ~ ties",
            "broken $ math and \\begin{align} tail",
        ];
        for s in samples {
            let once = strip_latex(s);
            assert_eq!(strip_latex(&once), once, "not idempotent on {s:?}");
        }
    }
}
