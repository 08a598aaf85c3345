//! OpenAPI description served at `GET /v1/spec`.

use serde_json::{json, Value};

fn error_response(description: &str) -> Value {
    json!({
        "description": description,
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
    })
}

fn ok(description: &str, schema: &str) -> Value {
    json!({
        "description": description,
        "content": {"application/json": {"schema": {"$ref": format!("#/components/schemas/{schema}")}}}
    })
}

fn body(schema: &str) -> Value {
    json!({
        "required": false,
        "content": {"application/json": {"schema": {"$ref": format!("#/components/schemas/{schema}")}}}
    })
}

fn id_param(name: &str) -> Value {
    json!({"name": name, "in": "path", "required": true, "schema": {"type": "string"}})
}

fn idempotency_param() -> Value {
    json!({
        "name": "Idempotency-Key",
        "in": "header",
        "required": false,
        "description": "Repeating a request with the same key returns the stored reply.",
        "schema": {"type": "string", "minLength": 1, "maxLength": 255}
    })
}

pub fn document() -> Value {
    json!({
        "openapi": "3.0.3",
        "info": {
            "title": "famsec service",
            "version": env!("CARGO_PKG_VERSION"),
            "description": "Task generation, self-confidence assessment and supervised execution."
        },
        "paths": {
            "/v1/spec": {"get": {
                "summary": "This document",
                "responses": {"200": {"description": "OpenAPI document"}}
            }},
            "/v1/sessions": {"post": {
                "summary": "Start a scoring session",
                "parameters": [idempotency_param()],
                "responses": {"201": ok("New session", "Session")}
            }},
            "/v1/sessions/{id}": {"get": {
                "summary": "Session score and decision history",
                "parameters": [id_param("id")],
                "responses": {"200": ok("Session", "Session"), "404": error_response("Unknown session")}
            }},
            "/v1/tasks": {"post": {
                "summary": "Register a hand-made task document",
                "parameters": [idempotency_param()],
                "requestBody": body("CreateTaskRequest"),
                "responses": {
                    "201": ok("Task", "Task"),
                    "404": error_response("Unknown session"),
                    "422": error_response("Invalid task document")
                }
            }},
            "/v1/tasks/generate": {"post": {
                "summary": "Generate an admissible random task",
                "parameters": [idempotency_param()],
                "requestBody": body("GenerateRequest"),
                "responses": {
                    "201": ok("Task", "Task"),
                    "404": error_response("Unknown session"),
                    "422": error_response("Invalid ranges"),
                    "500": error_response("No admissible task could be generated")
                }
            }},
            "/v1/tasks/{id}": {"get": {
                "summary": "Task record",
                "parameters": [id_param("id")],
                "responses": {"200": ok("Task", "Task"), "404": error_response("Unknown task")}
            }},
            "/v1/tasks/{id}/assess": {"post": {
                "summary": "Compute x_O and x_S for the candidate solver",
                "parameters": [id_param("id"), idempotency_param()],
                "requestBody": body("AssessRequest"),
                "responses": {
                    "200": ok("Assessment", "Assessment"),
                    "404": error_response("Unknown task"),
                    "409": error_response("Task already assessed"),
                    "422": error_response("Invalid parameters")
                }
            }},
            "/v1/tasks/{id}/decision": {"post": {
                "summary": "Record the supervisor's decision",
                "parameters": [id_param("id"), idempotency_param()],
                "requestBody": body("DecisionRequest"),
                "responses": {
                    "200": {"description": "Decision recorded"},
                    "404": error_response("Unknown task or session"),
                    "409": error_response("Task not assessed, or already decided"),
                    "422": error_response("Invalid decision or session")
                }
            }},
            "/v1/tasks/{id}/execute": {"post": {
                "summary": "Run one episode of an authorized task and score it",
                "parameters": [id_param("id"), idempotency_param()],
                "responses": {
                    "200": ok("Execution outcome", "Execution"),
                    "404": error_response("Unknown task"),
                    "409": error_response("Task has no decision, or was already executed")
                }
            }}
        },
        "components": {"schemas": {
            "Error": {
                "type": "object",
                "properties": {"error": {"type": "object", "properties": {
                    "status": {"type": "integer"},
                    "message": {"type": "string"}
                }}}
            },
            "Range": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "GenerateRequest": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "seed": {"type": "integer", "minimum": 0},
                    "n_range": {"allOf": [{"$ref": "#/components/schemas/Range"}], "description": "Within [8, 35]"},
                    "p_trans_range": {"allOf": [{"$ref": "#/components/schemas/Range"}], "description": "Within [0, 1]"},
                    "session_id": {"type": "string"}
                }
            },
            "CreateTaskRequest": {
                "type": "object",
                "additionalProperties": false,
                "required": ["task"],
                "properties": {
                    "task": {"type": "object", "description": "Task document: schema_version, network, task, seed"},
                    "session_id": {"type": "string"}
                }
            },
            "AssessRequest": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "zstar": {"type": "number", "default": 0},
                    "runs": {"type": "integer", "minimum": 2},
                    "trusted": {"type": "string", "description": "'model', 'none', or a solver such as 'vi' or 'mcts:depth=4'"},
                    "candidate": {"type": "string"}
                }
            },
            "DecisionRequest": {
                "type": "object",
                "additionalProperties": false,
                "required": ["decision"],
                "properties": {
                    "decision": {"type": "string", "enum": ["authorize", "cancel"]},
                    "session_id": {"type": "string"}
                }
            },
            "Session": {
                "type": "object",
                "properties": {
                    "session_id": {"type": "string"},
                    "score": {"type": "number"},
                    "history": {"type": "array", "items": {"type": "object"}},
                    "scoring": {"type": "object"}
                }
            },
            "Task": {
                "type": "object",
                "properties": {
                    "task_id": {"type": "string"},
                    "session_id": {"type": "string", "nullable": true},
                    "seed": {"type": "integer"},
                    "state": {"type": "string", "enum": ["generated", "assessed", "decided", "executed"]},
                    "task": {"type": "object"},
                    "rejections": {"type": "array", "items": {"type": "string"}}
                }
            },
            "Assessment": {
                "type": "object",
                "properties": {
                    "indicators": {"type": "object", "properties": {
                        "x_o": {"type": "number", "minimum": -1, "maximum": 1},
                        "x_s": {"type": "number", "minimum": 0, "maximum": 2, "nullable": true}
                    }},
                    "labels": {"type": "object"},
                    "x_o": {"type": "object"},
                    "x_s": {"type": "object", "nullable": true},
                    "candidate_summary": {"type": "object"},
                    "flags": {"type": "array", "items": {"type": "string"}}
                }
            },
            "Execution": {
                "type": "object",
                "properties": {
                    "executed": {"type": "boolean"},
                    "outcome": {"type": "string", "enum": ["delivered", "caught", "timeout", "cancelled"]},
                    "cumulative_reward": {"type": "number", "nullable": true},
                    "trace": {"type": "object", "nullable": true},
                    "score_delta": {"type": "number"},
                    "session_score": {"type": "number"}
                }
            }
        }}
    })
}
