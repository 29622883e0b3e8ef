/**
 * Card editor forms generated from the service's card schema, so the UI
 * can never drift from the parser's field list.
 */

import { CardSchema } from "./schema.js";

export interface FormField {
  name: string;
  type: string;
  required: boolean;
  enumValues: string[] | null;
}

export function formFields(schema: CardSchema, card: "data_card" | "model_card"): FormField[] {
  const section = schema[card] ?? {};
  return Object.keys(section).map((name) => {
    const spec = section[name] as Record<string, unknown>;
    return {
      name,
      type: String(spec.type ?? "string"),
      required: Boolean(spec.required),
      enumValues: Array.isArray(spec.values) ? spec.values.map(String) : null,
    };
  });
}

/** Seed content for the editors: the bundled demo scenario. */
export const DEMO_DATA_CARD = {
  name: "New",
  input_type: "image",
  label_space: ["heron", "lynx", "otter"],
  task_description: "classify",
  eval_metrics: ["accuracy"],
};

export const DEMO_MODEL_CARD = {
  name: "vit-base",
  structure: "vit-b/16 encoder with a linear classification head",
  description: "vision transformer image classifier finetuned end to end",
  arch_hparams: {
    learning_rate: {
      kind: "continuous_log",
      domain: [1e-6, 1e-1],
      default: 1e-4,
      flexibility: "tunable",
    },
    epochs: { kind: "integer", domain: [1, 300], default: 90, flexibility: "fixed" },
  },
};
