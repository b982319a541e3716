"""Default prompt templates, one per subagent stage.

Prompts are configuration, not code: SystemConfig can replace any of them
per model family. Every user-facing template keeps a stable leading marker
phrase so substring-keyed mock scripts can address individual stages.
"""

SUPERVISOR_SYSTEM = (
    "You are the supervisor of an on-farm dairy assistant. Classify the "
    "farmer's question and reply with exactly one of these labels and "
    "nothing else: text_subagent, sql_subagent, nosql_subagent, "
    "model_subagent, clarify_subagent."
)

SUPERVISOR_USER = "Classify this question. Question: {question}"

TEXT_ANSWER_SYSTEM = (
    "You answer dairy-science questions using only the literature abstracts "
    "provided. Cite nothing outside them. If they do not contain the answer, "
    "say so."
)

TEXT_ANSWER_USER = (
    "Answer from the abstracts below.\n\nQuestion: {question}\n\n"
    "Abstracts:\n{context}"
)

GRADE_JDS_USER = (
    "Is this literature answer adequate for the question? Reply yes or no "
    "only.\n\nQuestion: {question}\n\nAnswer: {answer}"
)

WEB_ANSWER_USER = (
    "Answer from the web search results below.\n\nQuestion: {question}\n\n"
    "Results:\n{context}"
)

GRADE_WEB_USER = (
    "Is this web answer adequate for the question? Reply yes or no only."
    "\n\nQuestion: {question}\n\nAnswer: {answer}"
)

SQL_GENERATE_SYSTEM = (
    "You translate dairy-farm questions into a single read-only SQL SELECT "
    "statement for the schema provided. Output only the SQL."
)

SQL_GENERATE_USER = (
    "Write one SQL SELECT statement for this question.\n\nSchema:\n{schema}\n\n"
    "Question: {question}"
)

PHRASE_RESULT_USER = (
    "Phrase this query result as a short answer for the farmer.\n\n"
    "Question: {question}\n\nResult table:\n{table}"
)

DSL_GENERATE_SYSTEM = (
    "You translate dairy-farm questions into one dataframe program over the "
    "table named df. Use only the documented steps: select, filter, "
    "distinct, groupBy/agg, count, avg, orderBy, limit. Output only the "
    "program, starting with 'result = df'."
)

DSL_GENERATE_USER = (
    "Write one dataframe program for this question.\n\nColumns:\n{columns}\n\n"
    "Question: {question}"
)

DSL_REPAIR_USER = (
    "Your dataframe program failed to parse: {error}\n"
    "Rewrite one valid program for the question.\n\nColumns:\n{columns}\n\n"
    "Question: {question}"
)

EXTRACT_PARAMS_SYSTEM = (
    "You extract lactation-curve inputs from the farmer's question. Reply "
    "with JSON only: {{\"region\": [..], \"parity\": [..], \"dim_range\": [..]}}. "
    "dim_range may be an explicit day list or a [start, end] pair."
)

EXTRACT_PARAMS_USER = "Extract region, parity and DIM range. Question: {question}"

EXTRACT_PARAMS_REPAIR_USER = (
    "Your extraction was not valid JSON: {error}\n"
    "Extract region, parity and DIM range again, JSON only. Question: {question}"
)

#: Fixed intention-validation response, returned verbatim for CLARIFY turns.
CLARIFY_TEMPLATE = (
    "Not sure what your intention is. Could you clarify if you are looking "
    "for general dairy knowledge and practices, details from your own "
    "farm's records, or predictions about herd performance or industry "
    "trends? Please also note that this chatbot is not designed to provide "
    "unethical or harmful responses."
)
