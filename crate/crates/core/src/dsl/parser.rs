//! Token stream to syntax tree. Values stay as spanned strings; keyword and
//! id validation happens when the tree is built into a case.

use super::lexer::{Tok, Token};
use super::{ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub text: String,
    pub span: SourceSpan,
}

#[derive(Debug, Default)]
pub(crate) struct Ast {
    pub header: Option<(Spanned, String)>,
    pub schema: Option<Spanned>,
    pub threshold: Option<Spanned>,
    pub principles: Vec<PrincipleDecl>,
    pub elements: Vec<ElementDecl>,
    pub goal_nodes: Vec<GoalNodeDecl>,
    pub goal_roots: Vec<Spanned>,
    pub goal_links: Vec<GoalLinkDecl>,
    pub questions: Vec<QuestionDecl>,
}

#[derive(Debug)]
pub(crate) struct PrincipleDecl {
    pub id: Spanned,
    pub segments: Vec<Spanned>,
}

#[derive(Debug)]
pub(crate) struct ElementDecl {
    pub kind: Spanned,
    pub id: Spanned,
    pub principle: Spanned,
    pub segment: Spanned,
    pub links: Vec<Spanned>,
    pub verify: Option<Spanned>,
    pub stage: Option<Spanned>,
    pub action: Option<(Spanned, Spanned)>,
    pub description: String,
}

#[derive(Debug)]
pub(crate) struct GoalNodeDecl {
    pub kind: Spanned,
    pub id: Spanned,
    pub actor: Option<Spanned>,
    pub bound: Option<Spanned>,
    pub sat: Option<Spanned>,
    pub label: String,
}

#[derive(Debug)]
pub(crate) enum GoalLinkShape {
    /// `and|or P <- [children]`
    Decomposition {
        op: Spanned,
        parent: Spanned,
        children: Vec<Spanned>,
    },
    /// `contrib P <- C kind`
    Contribution {
        parent: Spanned,
        child: Spanned,
        kind: Spanned,
    },
    /// `depends A -> B`
    Dependency { depender: Spanned, dependee: Spanned },
}

#[derive(Debug)]
pub(crate) struct GoalLinkDecl {
    pub shape: GoalLinkShape,
    pub span: SourceSpan,
}

#[derive(Debug)]
pub(crate) enum QuestionTypeDecl {
    Choice(Vec<String>),
    Extended,
    Metric(Spanned),
}

#[derive(Debug)]
pub(crate) struct QuestionDecl {
    pub id: Spanned,
    pub principle: Spanned,
    pub segment: Spanned,
    pub stage: Spanned,
    pub desideratum: Spanned,
    pub qtype: QuestionTypeDecl,
    pub links: Vec<Spanned>,
    pub retired: bool,
    pub text: String,
}

/// Marker for a statement that already reported its syntax error.
struct Failed;

type PResult<T> = Result<T, Failed>;

const ELEMENT_KEYWORDS: [&str; 9] = [
    "loss",
    "hazard",
    "control_action",
    "uaia",
    "scenario",
    "constraint",
    "recommendation",
    "requirement",
    "evidence",
];
const GOAL_KEYWORDS: [&str; 5] = ["goal", "softgoal", "task", "resource", "belief"];

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: SourceSpan,
    pub diags: Vec<ParseDiagnostic>,
}

impl Parser {
    pub fn new(tokens: Vec<Token>, end: SourceSpan) -> Self {
        Self {
            tokens,
            pos: 0,
            end,
            diags: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Word(w)) => Some(w),
            _ => None,
        }
    }

    fn here(&self) -> SourceSpan {
        self.peek().map_or(self.end, |t| t.span)
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let (span, found) = match self.peek() {
            Some(t) => (t.span, t.tok.describe()),
            None => (self.end, "end of input".to_string()),
        };
        self.diags.push(ParseDiagnostic::error(
            "syntax",
            span,
            format!("expected {expected}, found {found}"),
        ));
        Err(Failed)
    }

    /// Skips the rest of the offending line, stopping before a `}`.
    fn recover(&mut self, from: SourceSpan) {
        while let Some(t) = self.peek() {
            if t.span.line != from.line || t.tok == Tok::RBrace {
                break;
            }
            self.pos += 1;
        }
    }

    fn word(&mut self, what: &str) -> PResult<Spanned> {
        match self.peek() {
            Some(Token {
                tok: Tok::Word(w),
                span,
            }) => {
                let s = Spanned {
                    text: w.clone(),
                    span: *span,
                };
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        match self.peek() {
            Some(Token {
                tok: Tok::Word(w),
                span,
            }) if w == kw => {
                let span = *span;
                self.pos += 1;
                Ok(span)
            }
            _ => self.fail(&format!("`{kw}`")),
        }
    }

    fn punct(&mut self, tok: Tok) -> PResult<SourceSpan> {
        match self.peek() {
            Some(t) if t.tok == tok => {
                let span = t.span;
                self.pos += 1;
                Ok(span)
            }
            _ => self.fail(&tok.describe()),
        }
    }

    fn string(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Token { tok: Tok::Str(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|t| &t.tok == tok)
    }

    /// `[a, b, ...]`, possibly empty.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.punct(Tok::LBracket)?;
        let mut out = Vec::new();
        if self.at(&Tok::RBracket) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.at(&Tok::Comma) {
                self.pos += 1;
            } else {
                self.punct(Tok::RBracket)?;
                return Ok(out);
            }
        }
    }

    fn once<T>(&mut self, slot: &Option<T>, kw: &Spanned) -> PResult<()> {
        if slot.is_some() {
            self.diags.push(ParseDiagnostic::error(
                "syntax",
                kw.span,
                format!("duplicate `{}` clause", kw.text),
            ));
            return Err(Failed);
        }
        Ok(())
    }

    pub fn parse_file(mut self) -> (Ast, Vec<ParseDiagnostic>) {
        let mut ast = Ast::default();
        let start = self.here();
        match self.header() {
            Ok(h) => ast.header = Some(h),
            Err(Failed) => self.recover(start),
        }
        while let Some(t) = self.peek() {
            let span = t.span;
            let result = match &t.tok {
                Tok::Word(w) => match w.as_str() {
                    "schema" => self.option().map(|v| ast.schema = Some(v)),
                    "threshold" => self.option().map(|v| ast.threshold = Some(v)),
                    "principle" => self.principle_block(&mut ast),
                    "goalgraph" => self.goal_block(&mut ast),
                    "checklist" => self.checklist_block(&mut ast),
                    w if ELEMENT_KEYWORDS.contains(&w) => self.element(None).map(|e| {
                        ast.principles.push(PrincipleDecl {
                            id: e.principle.clone(),
                            segments: vec![e.segment.clone()],
                        });
                        ast.elements.push(e);
                    }),
                    _ => self.fail("a declaration"),
                },
                Tok::RBrace => {
                    self.diags.push(ParseDiagnostic::error("syntax", span, "unmatched `}`"));
                    self.pos += 1;
                    Ok(())
                }
                _ => self.fail("a declaration"),
            };
            if result.is_err() {
                self.recover(span);
                if self.pos < self.tokens.len() && self.tokens[self.pos].span == span {
                    self.pos += 1;
                }
            }
        }
        (ast, self.diags)
    }

    fn header(&mut self) -> PResult<(Spanned, String)> {
        self.keyword("case")?;
        let id = self.word("a case id")?;
        let title = self.string("a quoted case title")?;
        Ok((id, title))
    }

    fn option(&mut self) -> PResult<Spanned> {
        self.pos += 1;
        self.word("a number")
    }

    /// Runs the statements of a `{ ... }` body until its closing brace.
    fn block(&mut self, opened: SourceSpan, mut stmt: impl FnMut(&mut Self) -> PResult<()>) -> PResult<()> {
        loop {
            match self.peek() {
                None => {
                    self.diags
                        .push(ParseDiagnostic::error("syntax", opened, "unclosed `{`"));
                    return Ok(());
                }
                Some(t) if t.tok == Tok::RBrace => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(t) => {
                    let span = t.span;
                    if stmt(self).is_err() {
                        self.recover(span);
                        if self.peek().is_some_and(|t| t.span == span) {
                            self.pos += 1;
                        }
                    }
                }
            }
        }
    }

    fn principle_block(&mut self, ast: &mut Ast) -> PResult<()> {
        self.pos += 1;
        let id = self.word("a principle id")?;
        let opened = self.punct(Tok::LBrace)?;
        let mut segments = Vec::new();
        let mut elements = Vec::new();
        self.block(opened, |p| {
            p.keyword("segment")?;
            let segment = p.word("a segment id")?;
            let opened = p.punct(Tok::LBrace)?;
            segments.push(segment.clone());
            p.block(opened, |p| match p.peek_word() {
                Some(w) if ELEMENT_KEYWORDS.contains(&w) => {
                    let e = p.element(Some((&id, &segment)))?;
                    elements.push(e);
                    Ok(())
                }
                _ => p.fail("an element declaration"),
            })
        })?;
        ast.principles.push(PrincipleDecl { id, segments });
        ast.elements.extend(elements);
        Ok(())
    }

    fn element(&mut self, scope: Option<(&Spanned, &Spanned)>) -> PResult<ElementDecl> {
        let kind = self.word("an element kind")?;
        let id = self.word("an element id")?;
        let mut placed: Option<(Spanned, Spanned)> = None;
        let mut links: Option<Vec<Spanned>> = None;
        let mut verify = None;
        let mut stage = None;
        let mut action = None;
        let description = loop {
            if let Some(Token { tok: Tok::Str(s), .. }) = self.peek() {
                let s = s.clone();
                self.pos += 1;
                break s;
            }
            let clause = self.word("an element clause or a quoted description")?;
            match clause.text.as_str() {
                "in" => {
                    if scope.is_some() {
                        self.diags.push(ParseDiagnostic::error(
                            "syntax",
                            clause.span,
                            "`in` is only allowed outside segment blocks",
                        ));
                        return Err(Failed);
                    }
                    self.once(&placed, &clause)?;
                    let p = self.word("a principle id")?;
                    self.punct(Tok::Slash)?;
                    let s = self.word("a segment id")?;
                    placed = Some((p, s));
                }
                "links" => {
                    self.once(&links, &clause)?;
                    links = Some(self.list(|p| p.word("an element id"))?);
                }
                "verify" => {
                    self.once(&verify, &clause)?;
                    verify = Some(self.word("a verification method")?);
                }
                "stage" => {
                    self.once(&stage, &clause)?;
                    stage = Some(self.word("a lifecycle stage")?);
                }
                "action" => {
                    self.once(&action, &clause)?;
                    let a = self.word("a control action id")?;
                    let m = self.word("`provided` or `not_provided`")?;
                    action = Some((a, m));
                }
                _ => {
                    self.pos -= 1;
                    return self.fail("an element clause or a quoted description");
                }
            }
        };
        let (principle, segment) = match (scope, placed) {
            (Some((p, s)), _) => (p.clone(), s.clone()),
            (None, Some(ps)) => ps,
            (None, None) => {
                self.diags.push(ParseDiagnostic::error(
                    "syntax",
                    id.span,
                    "elements outside a segment block need `in <principle>/<segment>`",
                ));
                return Err(Failed);
            }
        };
        Ok(ElementDecl {
            kind,
            id,
            principle,
            segment,
            links: links.unwrap_or_default(),
            verify,
            stage,
            action,
            description,
        })
    }

    fn goal_block(&mut self, ast: &mut Ast) -> PResult<()> {
        self.pos += 1;
        let opened = self.punct(Tok::LBrace)?;
        self.block(opened, |p| {
            let start = p.here();
            let Some(w) = p.peek_word().map(str::to_string) else {
                return p.fail("a goal-graph statement");
            };
            match w.as_str() {
                w if GOAL_KEYWORDS.contains(&w) => {
                    let node = p.goal_node()?;
                    ast.goal_nodes.push(node);
                }
                "root" => {
                    p.pos += 1;
                    ast.goal_roots.push(p.word("a goal id")?);
                }
                "and" | "or" => {
                    let op = p.word("`and` or `or`")?;
                    let parent = p.word("a parent goal id")?;
                    p.punct(Tok::From)?;
                    let children = p.list(|p| p.word("a child goal id"))?;
                    let span = start.to(p.prev_span());
                    ast.goal_links.push(GoalLinkDecl {
                        shape: GoalLinkShape::Decomposition { op, parent, children },
                        span,
                    });
                }
                "contrib" => {
                    p.pos += 1;
                    let parent = p.word("a parent goal id")?;
                    p.punct(Tok::From)?;
                    let child = p.word("a child goal id")?;
                    let kind = p.word("a contribution kind")?;
                    let span = start.to(p.prev_span());
                    ast.goal_links.push(GoalLinkDecl {
                        shape: GoalLinkShape::Contribution { parent, child, kind },
                        span,
                    });
                }
                "depends" => {
                    p.pos += 1;
                    let depender = p.word("a goal id")?;
                    p.punct(Tok::To)?;
                    let dependee = p.word("a goal id")?;
                    let span = start.to(p.prev_span());
                    ast.goal_links.push(GoalLinkDecl {
                        shape: GoalLinkShape::Dependency { depender, dependee },
                        span,
                    });
                }
                _ => return p.fail("a goal-graph statement"),
            }
            Ok(())
        })
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos - 1].span
    }

    fn goal_node(&mut self) -> PResult<GoalNodeDecl> {
        let kind = self.word("a goal kind")?;
        let id = self.word("a goal id")?;
        let (mut actor, mut bound, mut sat) = (None, None, None);
        let label = loop {
            if let Some(Token { tok: Tok::Str(s), .. }) = self.peek() {
                let s = s.clone();
                self.pos += 1;
                break s;
            }
            let clause = self.word("a goal clause or a quoted label")?;
            let slot = match clause.text.as_str() {
                "actor" => &mut actor,
                "bound" => &mut bound,
                "sat" => &mut sat,
                _ => {
                    self.pos -= 1;
                    return self.fail("a goal clause or a quoted label");
                }
            };
            if slot.is_some() {
                self.diags.push(ParseDiagnostic::error(
                    "syntax",
                    clause.span,
                    format!("duplicate `{}` clause", clause.text),
                ));
                return Err(Failed);
            }
            let value = self.word("a value")?;
            *slot = Some(value);
        };
        Ok(GoalNodeDecl {
            kind,
            id,
            actor,
            bound,
            sat,
            label,
        })
    }

    fn checklist_block(&mut self, ast: &mut Ast) -> PResult<()> {
        self.pos += 1;
        let opened = self.punct(Tok::LBrace)?;
        self.block(opened, |p| {
            let q = p.question()?;
            ast.questions.push(q);
            Ok(())
        })
    }

    fn question(&mut self) -> PResult<QuestionDecl> {
        self.keyword("question")?;
        let id = self.word("a question id")?;
        self.keyword("in")?;
        let principle = self.word("a principle id")?;
        self.punct(Tok::Slash)?;
        let segment = self.word("a segment id")?;
        self.keyword("stage")?;
        let stage = self.word("a lifecycle stage")?;
        self.keyword("desideratum")?;
        let desideratum = self.word("a desideratum")?;
        let qtype = match self.peek_word() {
            Some("choice") => {
                self.pos += 1;
                QuestionTypeDecl::Choice(self.list(|p| p.string("a quoted option"))?)
            }
            Some("extended") => {
                self.pos += 1;
                QuestionTypeDecl::Extended
            }
            Some("metric") => {
                self.pos += 1;
                QuestionTypeDecl::Metric(self.word("a metric")?)
            }
            _ => return self.fail("`choice`, `extended` or `metric`"),
        };
        let mut links = None;
        let mut retired = false;
        let text = loop {
            if let Some(Token { tok: Tok::Str(s), .. }) = self.peek() {
                let s = s.clone();
                self.pos += 1;
                break s;
            }
            let clause = self.word("`links`, `retired` or the quoted question text")?;
            match clause.text.as_str() {
                "links" => {
                    self.once(&links, &clause)?;
                    links = Some(self.list(|p| p.word("a requirement id"))?);
                }
                "retired" if !retired => retired = true,
                _ => {
                    self.pos -= 1;
                    return self.fail("`links`, `retired` or the quoted question text");
                }
            }
        };
        Ok(QuestionDecl {
            id,
            principle,
            segment,
            stage,
            desideratum,
            qtype,
            links: links.unwrap_or_default(),
            retired,
            text,
        })
    }
}
