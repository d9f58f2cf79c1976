import { App } from "./app.js";

function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app mount point");
  }
  const app = new App(root);
  const form = document.getElementById("project-form") as HTMLFormElement | null;
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const field = document.getElementById("project-id") as HTMLInputElement;
    const projectId = field.value.trim();
    if (projectId) {
      void app.open(projectId).catch((error) => {
        root.innerHTML = `<p class="notice error">${String(error)}</p>`;
      });
    }
  });
}

bootstrap();
