/** HTTP client for the scene synthesis service.
 *
 * Requests that fail the local validation mirror are rejected before any
 * network traffic with the same status/field the service would return; what
 * does go out is exactly the JSON the service's endpoints document.
 */

import {
  FieldError,
  GenerateBody,
  ServiceShape,
  SweepBody,
  validateGenerateBody,
  validateSweepBody,
  Variant,
} from "./validate.js";

export interface Meta {
  labels: string[];
  attributes: string[];
  palette: [number, number, number][];
  resolution: number | null;
  checkpoint_hash: string | null;
  variant: Variant | null;
}

export interface Provenance {
  checkpoint_hash: string;
  seed: number;
  latency_ms: number;
  attribute_index?: number;
}

export interface GenerateResponse {
  image: string;
  provenance: Provenance;
}

export interface SweepResponse {
  images: string[];
  strengths: number[];
  provenance: Provenance;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly field: string | null = null,
    readonly local = false,
  ) {
    super(detail);
  }
}

function shapeFromMeta(meta: Meta): ServiceShape {
  if (meta.variant === null || meta.resolution === null) {
    throw new ServiceError(503, "no checkpoint loaded", null, true);
  }
  return {
    variant: meta.variant,
    resolution: meta.resolution,
    attributeCount: meta.attributes.length,
    checkpointHash: meta.checkpoint_hash,
  };
}

export class StudioClient {
  private cachedMeta: Meta | null = null;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ServiceError(0, `service unreachable at ${this.baseUrl}: ${err}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // fall through: non-JSON error body
    }
    if (!response.ok) {
      const detail =
        body !== null && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : `HTTP ${response.status}`;
      const field =
        body !== null && typeof body === "object" && "field" in body
          ? String((body as { field: unknown }).field)
          : null;
      throw new ServiceError(response.status, detail, field);
    }
    return body as T;
  }

  async meta(refresh = false): Promise<Meta> {
    if (this.cachedMeta === null || refresh) {
      this.cachedMeta = await this.request<Meta>("/meta");
    }
    return this.cachedMeta;
  }

  private async preflight(
    body: GenerateBody,
    check: (body: GenerateBody, shape: ServiceShape) => Promise<FieldError | null>,
  ): Promise<void> {
    const shape = shapeFromMeta(await this.meta());
    const error = await check(body, shape);
    if (error !== null) {
      throw new ServiceError(422, error.message, error.field, true);
    }
  }

  async generate(body: GenerateBody): Promise<GenerateResponse> {
    await this.preflight(body, validateGenerateBody);
    return this.request<GenerateResponse>("/generate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async sweep(body: SweepBody): Promise<SweepResponse> {
    await this.preflight(body, (b, shape) => validateSweepBody(b as SweepBody, shape));
    return this.request<SweepResponse>("/sweep", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}
